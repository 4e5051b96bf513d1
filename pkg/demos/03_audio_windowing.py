#!/usr/bin/env python3
"""From a WAV file to per-part spectral widths.

Writes a synthetic three-minute "song" (cascade-modulated noise, so it
has music-like amplitude bursts), decodes it back from disk like any
recording, cuts it into 6 parts x 5 windows of 6 s, and reports the
average width per part: one row of a width table.
"""

import tempfile
from pathlib import Path

import numpy as np

from mfaudio import (
    WindowPlan,
    decode_wav,
    gen_cascade_noise,
    mfdfa,
    partition_windows,
    write_wav,
)


def main():
    rate = 22050.0
    seconds = 180
    plan = WindowPlan(
        clip_start=0.0, clip_length=180.0,
        part_count=6, part_length=30.0, window_length=6.0,
    )

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "song.wav"
        write_wav(path, gen_cascade_noise(int(seconds * rate), 0.7, seed=4, sample_rate=rate))
        signal = decode_wav(path)
        print(f"decoded {path.name}: {len(signal)} samples at {signal.sample_rate:g} Hz "
              f"({signal.duration:.0f} s)")

        parts = partition_windows(signal, plan)
        print(f"plan: {plan.part_count} parts x {plan.windows_per_part} windows "
              f"of {plan.window_length:g} s\n")

        print("  part   windows   mean W   min W   max W   mean h(2)")
        for i, windows in enumerate(parts, start=1):
            results = [mfdfa(w) for w in windows]
            widths = np.array([r.width.width for r in results])
            h2s = np.array([r.hurst.at(2.0)[0] for r in results])
            print(
                f"  {i:4d}   {len(windows):7d}   {widths.mean():6.3f}  "
                f"{widths.min():6.3f}  {widths.max():6.3f}   {h2s.mean():9.3f}"
            )


if __name__ == "__main__":
    main()
