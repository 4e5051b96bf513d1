"""PCM WAV ingestion and the clip -> part -> window segmentation.

Only RIFF/WAVE containers holding integer PCM (8/16/24/32 bit) or 32-bit
float PCM are decoded; anything compressed is refused rather than guessed.
Integer samples are normalized to [-1, 1] by the power-of-two divisor of
their bit depth (16-bit: divide by 32768, so -32768 maps to -1.0 exactly).
Analysis always runs at the native sample rate; nothing here resamples.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ClipBoundsError,
    ConfigError,
    EmptySignalError,
    InsufficientAudioError,
    NonFiniteDataError,
    UnsupportedCodecError,
    WavFormatError,
)

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# Guard added before floor() so second->sample conversions that are exact
# in decimal (e.g. 180 * 22050) cannot land one sample short in binary.
_FLOOR_GUARD = 1e-6


@dataclass(frozen=True, eq=False)
class Signal:
    """A finite real-valued sample sequence at a fixed rate.

    Amplitudes are dimensionless (PCM input arrives normalized to
    [-1, 1]); ``sample_rate`` is in Hz.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ConfigError(f"signal samples must be 1-D, got shape {samples.shape}")
        if samples.size == 0:
            raise EmptySignalError("signal holds zero samples")
        if not np.all(np.isfinite(samples)):
            raise NonFiniteDataError("signal samples contain NaN or infinity")
        if not self.sample_rate > 0:
            raise ConfigError(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class WindowPlan:
    """Clip -> part -> window segmentation recipe, all in seconds.

    A clip of ``clip_length`` seconds starting at ``clip_start`` is cut
    into ``part_count`` consecutive parts of ``part_length`` seconds;
    each part is cut into non-overlapping windows of ``window_length``
    seconds.  Remainder samples at part or window boundaries are dropped,
    never zero-padded.
    """

    clip_start: float = 0.0
    clip_length: float = 180.0
    part_count: int = 6
    part_length: float = 30.0
    window_length: float = 6.0

    def __post_init__(self):
        if self.clip_start < 0:
            raise ConfigError(f"clip_start must be >= 0, got {self.clip_start}")
        for name in ("clip_length", "part_length", "window_length"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.part_count < 1:
            raise ConfigError(f"part_count must be >= 1, got {self.part_count}")
        if self.part_count * self.part_length > self.clip_length + 1e-9:
            raise ConfigError(
                f"{self.part_count} parts of {self.part_length:g} s exceed "
                f"the {self.clip_length:g} s clip"
            )
        if self.window_length > self.part_length + 1e-9:
            raise ConfigError(
                f"window of {self.window_length:g} s does not fit in a "
                f"{self.part_length:g} s part"
            )

    @property
    def windows_per_part(self) -> int:
        return int(math.floor(self.part_length / self.window_length + 1e-9))

    @property
    def required_seconds(self) -> float:
        return self.clip_start + self.clip_length


def decode_wav(path: str | Path) -> Signal:
    """Decode a PCM WAV file into a mono, [-1, 1]-normalized Signal.

    Multichannel input is mixed down by per-frame channel average.  The
    sample rate comes from the ``fmt `` chunk; chunks other than ``fmt ``
    and ``data`` are skipped.

    Raises WavFormatError for a missing or corrupt container,
    UnsupportedCodecError for compressed codecs, and EmptySignalError for
    a data chunk with zero frames.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body, path)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError(f"{path}: missing 'fmt ' chunk")
    if payload is None:
        raise WavFormatError(f"{path}: missing 'data' chunk")

    tag, channels, rate, bits = fmt
    if tag == _WAVE_FORMAT_PCM:
        if bits not in (8, 16, 24, 32):
            raise UnsupportedCodecError(f"{path}: {bits}-bit integer PCM is not supported")
    elif tag == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedCodecError(f"{path}: {bits}-bit float PCM is not supported")
    else:
        raise UnsupportedCodecError(
            f"{path}: compressed or unknown codec (format tag 0x{tag:04x})"
        )

    frame_size = channels * (bits // 8)
    n_frames = len(payload) // frame_size
    if n_frames == 0:
        raise EmptySignalError(f"{path}: WAV holds zero frames")

    flat = _decode_samples(payload[: n_frames * frame_size], tag, bits)
    mono = flat.reshape(n_frames, channels).mean(axis=1)
    if not np.all(np.isfinite(mono)):
        raise NonFiniteDataError(f"{path}: decoded samples are not finite")
    return Signal(mono, float(rate))


def _parse_fmt(body: bytes, path) -> tuple[int, int, int, int]:
    if len(body) < 16:
        raise WavFormatError(f"{path}: truncated 'fmt ' chunk")
    tag, channels, rate, _byte_rate, _align, bits = struct.unpack_from("<HHIIHH", body, 0)
    if tag == _WAVE_FORMAT_EXTENSIBLE:
        # the real format code sits in the first two bytes of the sub-format GUID
        if len(body) < 26:
            raise WavFormatError(f"{path}: truncated extensible 'fmt ' chunk")
        (tag,) = struct.unpack_from("<H", body, 24)
    if channels < 1:
        raise WavFormatError(f"{path}: invalid channel count {channels}")
    if rate <= 0:
        raise WavFormatError(f"{path}: invalid sample rate {rate}")
    if bits % 8 or bits == 0:
        raise WavFormatError(f"{path}: invalid bit depth {bits}")
    return tag, channels, rate, bits


def _decode_samples(payload: bytes, tag: int, bits: int) -> np.ndarray:
    if tag == _WAVE_FORMAT_IEEE_FLOAT:
        return np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if bits == 8:
        raw = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
        return (raw - 128.0) / 128.0
    if bits == 16:
        return np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        val = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        val -= (val & 0x800000) << 1  # sign extension
        return val.astype(np.float64) / 8388608.0
    return np.frombuffer(payload, dtype="<i4").astype(np.float64) / 2147483648.0


def write_wav(path: str | Path, signal: Signal, encoding: str = "float32") -> None:
    """Write a mono WAV file.

    ``float32`` stores IEEE-float PCM (decode_wav round-trips it up to
    float32 precision); ``int16`` scales by 32767 and rounds.
    """
    if encoding == "float32":
        tag, bits = _WAVE_FORMAT_IEEE_FLOAT, 32
        body = signal.samples.astype("<f4").tobytes()
    elif encoding == "int16":
        tag, bits = _WAVE_FORMAT_PCM, 16
        scaled = np.clip(np.rint(signal.samples * 32767.0), -32768, 32767)
        body = scaled.astype("<i2").tobytes()
    else:
        raise ConfigError(f"unknown WAV encoding {encoding!r}")

    rate = int(round(signal.sample_rate))
    frame = bits // 8
    header = struct.pack("<HHIIHH", tag, 1, rate, rate * frame, frame, bits)
    Path(path).write_bytes(
        _chunk(b"RIFF", b"WAVE" + _chunk(b"fmt ", header) + _chunk(b"data", body))
    )


def _chunk(chunk_id: bytes, body: bytes) -> bytes:
    pad = b"\x00" if len(body) & 1 else b""
    return chunk_id + struct.pack("<I", len(body)) + body + pad


def extract_clip(signal: Signal, start: float, length: float) -> Signal:
    """Contiguous sub-signal of ``length`` seconds starting at ``start``.

    Sample indices are floor(start * rate) .. floor((start + length) * rate).
    """
    if start < 0:
        raise ClipBoundsError(f"clip start {start:g} s is negative")
    if length <= 0:
        raise ClipBoundsError(f"clip length {length:g} s is not positive")
    i0 = math.floor(start * signal.sample_rate + _FLOOR_GUARD)
    i1 = math.floor((start + length) * signal.sample_rate + _FLOOR_GUARD)
    if i1 > len(signal):
        raise ClipBoundsError(
            f"clip [{start:g} s, {start + length:g} s) ends beyond the "
            f"{signal.duration:g} s signal"
        )
    if i1 <= i0:
        raise EmptySignalError(f"clip of {length:g} s holds no samples at this rate")
    return Signal(signal.samples[i0:i1], signal.sample_rate)


def partition_windows(signal: Signal, plan: WindowPlan) -> list[list[Signal]]:
    """Cut a signal into the plan's parts, each a list of window Signals.

    Within each part the windows are contiguous from the part start, so
    concatenating them reproduces a prefix of the part sample-for-sample;
    trailing remainder samples are dropped.
    """
    if plan.required_seconds > signal.duration + 1e-9:
        raise InsufficientAudioError(plan.required_seconds, signal.duration)
    clip = extract_clip(signal, plan.clip_start, plan.clip_length)

    rate = signal.sample_rate
    part_samples = math.floor(plan.part_length * rate + _FLOOR_GUARD)
    window_samples = math.floor(plan.window_length * rate + _FLOOR_GUARD)
    if window_samples < 1:
        raise ConfigError(
            f"window of {plan.window_length:g} s is shorter than one sample at {rate:g} Hz"
        )

    parts = []
    for p in range(plan.part_count):
        base = p * part_samples
        parts.append(
            [
                Signal(
                    clip.samples[base + w * window_samples : base + (w + 1) * window_samples],
                    rate,
                )
                for w in range(plan.windows_per_part)
            ]
        )
    return parts
