"""Corpus study protocol: per-window MFDFA, per-part width averaging, and
per-generation aggregation.

A recording is split by its :class:`WindowPlan` into parts, each part
into windows; every window gets a full MFDFA pass.  Windows whose
analysis degenerates (digital silence, a non-concave spectrum) are
flagged with the reason and excluded from part means instead of
poisoning them; a part whose every window is flagged is reported as
errored.  All means are plain arithmetic means of their listed
constituents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DegenerateSegmentError,
    InsufficientSpectrumError,
    MfaudioError,
    NonConcaveSpectrumError,
    SchemaError,
)
from .mfdfa import MfdfaConfig, mfdfa
from .signal_io import Signal, WindowPlan, decode_wav, partition_windows

# Window-level failures that flag the window instead of aborting the
# rendition.  Anything else (bad config, unreadable audio) is a real error.
_WINDOW_FLAG_ERRORS = (
    DegenerateSegmentError,
    NonConcaveSpectrumError,
    InsufficientSpectrumError,
)


def _slug(text: str) -> str:
    out = "".join(c.lower() if c.isalnum() else "-" for c in text)
    while "--" in out:
        out = out.replace("--", "-")
    return out.strip("-") or "x"


@dataclass(frozen=True)
class RenditionRecord:
    """One recording of one song by one artist; the unit of batch work."""

    song_id: str
    artist: str
    year: int
    generation_index: int
    audio_path: str | Path
    plan: WindowPlan = field(default_factory=WindowPlan)
    config: MfdfaConfig = field(default_factory=MfdfaConfig)

    def __post_init__(self):
        if self.generation_index < 1:
            raise ConfigError(f"generation_index must be >= 1, got {self.generation_index}")
        if not 1900 <= self.year <= 2100:
            raise ConfigError(f"year {self.year} is outside the plausible range 1900..2100")

    @property
    def rendition_id(self) -> str:
        return f"{_slug(self.song_id)}-{_slug(self.artist)}-{self.year}"


@dataclass(frozen=True)
class WindowResult:
    """Diagnostics of one analyzed window (indices are 1-based)."""

    window_index: int
    n_samples: int
    width: float
    alpha0: float
    asymmetry: float
    h2: float
    r2_q2: float
    flagged: bool = False
    flag_reason: str | None = None


@dataclass(frozen=True)
class PartResult:
    """All windows of one part plus their width statistics."""

    part_index: int
    windows: tuple[WindowResult, ...]

    @property
    def window_widths(self) -> list[float]:
        return [w.width for w in self.windows if not w.flagged]

    @property
    def flagged_count(self) -> int:
        return sum(1 for w in self.windows if w.flagged)

    @property
    def errored(self) -> bool:
        return len(self.windows) == 0 or all(w.flagged for w in self.windows)

    @property
    def mean_width(self) -> float:
        widths = self.window_widths
        return float(np.mean(widths)) if widths else math.nan

    @property
    def mean_alpha0(self) -> float:
        vals = [w.alpha0 for w in self.windows if not w.flagged]
        return float(np.mean(vals)) if vals else math.nan

    @property
    def mean_h2(self) -> float:
        vals = [w.h2 for w in self.windows if not w.flagged]
        return float(np.mean(vals)) if vals else math.nan


@dataclass(frozen=True)
class RenditionReport:
    """Per-part width statistics for one recording.

    ``mean_h`` is the arithmetic mean of h(q) over every unflagged
    window, suitable for plotting one representative spectrum per
    rendition.
    """

    record: RenditionRecord
    parts: tuple[PartResult, ...]
    q_grid: np.ndarray | None = None
    mean_h: np.ndarray | None = None

    @property
    def errored(self) -> bool:
        return any(p.errored for p in self.parts)

    @property
    def flagged_count(self) -> int:
        return sum(p.flagged_count for p in self.parts)


@dataclass(frozen=True)
class GenerationAggregate:
    """Average widths of one generation's renditions of one song."""

    song_id: str
    generation_index: int
    rendition_count: int
    part_mean_widths: tuple[float, ...]
    overall_mean_width: float


@dataclass(frozen=True)
class CrossGenerationTable:
    """Generation-by-part matrix of mean widths for one song."""

    song_id: str
    generation_indices: tuple[int, ...]
    mean_widths: np.ndarray  # shape (len(generation_indices), part_count)


def analyze_rendition(record: RenditionRecord, signal: Signal | None = None) -> RenditionReport:
    """Run MFDFA over every window of every part of one recording.

    ``signal`` skips the decode step when the audio is already in memory.
    Audio and plan errors propagate with the rendition identified.
    """
    try:
        if signal is None:
            signal = decode_wav(record.audio_path)
        part_signals = partition_windows(signal, record.plan)
    except MfaudioError as err:
        raise err.add_context(f"rendition {record.rendition_id}")

    parts: list[PartResult] = []
    h_sum = None
    h_count = 0
    q_grid = None
    for p_idx, windows in enumerate(part_signals, start=1):
        results: list[WindowResult] = []
        for w_idx, window in enumerate(windows, start=1):
            try:
                res = mfdfa(window, record.config)
            except _WINDOW_FLAG_ERRORS as err:
                results.append(
                    WindowResult(
                        w_idx, len(window), math.nan, math.nan, math.nan,
                        math.nan, math.nan, flagged=True, flag_reason=str(err),
                    )
                )
                continue
            except MfaudioError as err:
                raise err.add_context(
                    f"rendition {record.rendition_id} part {p_idx} window {w_idx}"
                )
            h2, r2 = res.hurst.at(2.0)
            results.append(
                WindowResult(
                    w_idx, len(window), res.width.width, res.width.alpha0,
                    res.width.asymmetry, h2, r2,
                )
            )
            q_grid = res.hurst.q_grid
            h_sum = res.hurst.h.copy() if h_sum is None else h_sum + res.hurst.h
            h_count += 1
        parts.append(PartResult(p_idx, tuple(results)))

    mean_h = h_sum / h_count if h_count else None
    return RenditionReport(record, tuple(parts), q_grid, mean_h)


def aggregate_generation(reports, song_id: str) -> list[GenerationAggregate]:
    """Group one song's reports by generation and average widths per part.

    Errored parts are excluded from the group mean; a part with no
    usable value in any rendition of the group aggregates to NaN.
    """
    chosen = [r for r in reports if r.record.song_id == song_id]
    if not chosen:
        return []
    part_counts = {len(r.parts) for r in chosen}
    if len(part_counts) != 1:
        raise SchemaError(
            f"mixed part counts {sorted(part_counts)} for song {song_id!r}"
        )
    n_parts = part_counts.pop()

    aggregates = []
    for gen in sorted({r.record.generation_index for r in chosen}):
        group = [r for r in chosen if r.record.generation_index == gen]
        per_part = []
        for p in range(n_parts):
            vals = [r.parts[p].mean_width for r in group if not r.parts[p].errored]
            per_part.append(float(np.mean(vals)) if vals else math.nan)
        aggregates.append(
            GenerationAggregate(
                song_id, gen, len(group), tuple(per_part), float(np.mean(per_part))
            )
        )
    return aggregates


def cross_generation_table(reports) -> CrossGenerationTable:
    """Matrix of mean widths: rows are generations (ascending), columns parts."""
    reports = list(reports)
    if not reports:
        raise SchemaError("no reports to tabulate")
    songs = {r.record.song_id for r in reports}
    if len(songs) != 1:
        raise SchemaError(f"expected reports of one song, got {sorted(songs)}")
    song_id = songs.pop()
    aggregates = aggregate_generation(reports, song_id)
    matrix = np.array([a.part_mean_widths for a in aggregates], dtype=float)
    return CrossGenerationTable(
        song_id, tuple(a.generation_index for a in aggregates), matrix
    )


# --- report serialization ------------------------------------------------
#
# Plain-dict form, JSON-compatible, round-trip exact (floats survive via
# Python's repr round-tripping).

def plan_to_dict(plan: WindowPlan) -> dict:
    return {
        "clip_start": plan.clip_start,
        "clip_length": plan.clip_length,
        "part_count": plan.part_count,
        "part_length": plan.part_length,
        "window_length": plan.window_length,
    }


def plan_from_dict(data: dict) -> WindowPlan:
    return WindowPlan(**data)


def config_to_dict(config: MfdfaConfig) -> dict:
    return {
        "q_grid": list(map(float, config.q_grid)),
        "scale_grid": None if config.scale_grid is None else list(map(int, config.scale_grid)),
        "detrend_order": config.detrend_order,
        "bidirectional": config.bidirectional,
        "fit_range": None if config.fit_range is None else list(config.fit_range),
        "width_method": config.width_method,
        "q_zero_epsilon": config.q_zero_epsilon,
    }


def config_from_dict(data: dict) -> MfdfaConfig:
    data = dict(data)
    if data.get("fit_range") is not None:
        data["fit_range"] = tuple(data["fit_range"])
    return MfdfaConfig(**data)


def record_to_dict(record: RenditionRecord) -> dict:
    return {
        "song_id": record.song_id,
        "artist": record.artist,
        "year": record.year,
        "generation_index": record.generation_index,
        "audio_path": str(record.audio_path),
        "plan": plan_to_dict(record.plan),
        "config": config_to_dict(record.config),
    }


def record_from_dict(data: dict) -> RenditionRecord:
    return RenditionRecord(
        song_id=data["song_id"],
        artist=data["artist"],
        year=data["year"],
        generation_index=data["generation_index"],
        audio_path=data["audio_path"],
        plan=plan_from_dict(data["plan"]),
        config=config_from_dict(data["config"]),
    )


def report_to_dict(report: RenditionReport) -> dict:
    return {
        "record": record_to_dict(report.record),
        "parts": [
            {
                "part_index": p.part_index,
                "mean_width": p.mean_width,
                "mean_alpha0": p.mean_alpha0,
                "mean_h2": p.mean_h2,
                "errored": p.errored,
                "windows": [
                    {
                        "window_index": w.window_index,
                        "n_samples": w.n_samples,
                        "width": w.width,
                        "alpha0": w.alpha0,
                        "asymmetry": w.asymmetry,
                        "h2": w.h2,
                        "r2_q2": w.r2_q2,
                        "flagged": w.flagged,
                        "flag_reason": w.flag_reason,
                    }
                    for w in p.windows
                ],
            }
            for p in report.parts
        ],
        "q_grid": None if report.q_grid is None else list(map(float, report.q_grid)),
        "mean_h": None if report.mean_h is None else list(map(float, report.mean_h)),
    }


def report_from_dict(data: dict) -> RenditionReport:
    parts = tuple(
        PartResult(
            p["part_index"],
            tuple(
                WindowResult(
                    w["window_index"], w["n_samples"], w["width"], w["alpha0"],
                    w["asymmetry"], w["h2"], w["r2_q2"], w["flagged"], w["flag_reason"],
                )
                for w in p["windows"]
            ),
        )
        for p in data["parts"]
    )
    q_grid = None if data["q_grid"] is None else np.asarray(data["q_grid"], dtype=float)
    mean_h = None if data["mean_h"] is None else np.asarray(data["mean_h"], dtype=float)
    return RenditionReport(record_from_dict(data["record"]), parts, q_grid, mean_h)
