"""Batch front door: validate a corpus manifest, run the study pipeline,
and emit CSV tables and plot data.

Outputs of ``mfaudio run`` (all CSV: UTF-8, LF line endings, '.' decimal
separator, fixed column order):

- ``widths.csv``        one row per (song, artist, year, generation, part)
- ``windows.csv``       one row per window with full diagnostics
- ``generations.csv``   per-generation aggregates (long format)
- ``spectrum_<id>.csv`` per-rendition mean h(q), tau, alpha, f(alpha)
- ``plot_<song>.csv``   long-format plot data per song
- ``plot_all_songs.csv``  the same across every song

``mfaudio synth`` builds a self-contained synthetic corpus (WAV files
plus a manifest) so the whole pipeline runs with zero external data.

Exit status: 0 on full success, 1 if any rendition errored, 2 for an
invalid manifest or arguments.  Errors go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import ManifestError, MfaudioError
from .manifest import Manifest, validate_manifest
from .mfdfa import HurstCurve, legendre_spectrum
from .pipeline import (
    RenditionReport,
    _slug,
    aggregate_generation,
    analyze_rendition,
    cross_generation_table,
)
from .signal_io import Signal, write_wav
from .synth import cascade_masses, gen_cascade_noise, gen_fgn_prefix


def _f17(x) -> str:
    """Round-trip-exact float formatting."""
    return format(float(x), ".17g")


def _f4(x) -> str:
    return format(float(x), ".4g")


def run_corpus(manifest: Manifest, jobs: int = 1):
    """Analyze every record; reports and failures come back in manifest order.

    Returns (outcomes, failures) where outcomes[i] is a RenditionReport or
    the MfaudioError that aborted entry i, and failures lists the errors.
    """
    if jobs <= 1:
        outcomes = [_safe_analyze(rec) for rec in manifest.records]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_safe_analyze, manifest.records))
    failures = [o for o in outcomes if isinstance(o, MfaudioError)]
    return outcomes, failures


def _safe_analyze(record):
    try:
        return analyze_rendition(record)
    except MfaudioError as err:
        return err


def _open_csv(path: Path):
    handle = open(path, "w", encoding="utf-8", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def write_widths_csv(reports: list[RenditionReport], path: Path) -> None:
    handle, writer = _open_csv(path)
    with handle:
        writer.writerow(
            ["song_id", "artist", "year", "generation", "part",
             "mean_width", "mean_alpha0", "mean_h2", "window_count", "flagged_count"]
        )
        for report in reports:
            rec = report.record
            for part in report.parts:
                writer.writerow(
                    [rec.song_id, rec.artist, rec.year, rec.generation_index,
                     part.part_index, _f4(part.mean_width), _f4(part.mean_alpha0),
                     _f4(part.mean_h2), len(part.windows), part.flagged_count]
                )


def write_windows_csv(reports: list[RenditionReport], path: Path) -> None:
    handle, writer = _open_csv(path)
    with handle:
        writer.writerow(
            ["song_id", "artist", "year", "generation", "part", "window",
             "n_samples", "width", "alpha0", "asymmetry", "h2", "r2_q2",
             "flagged", "flag_reason"]
        )
        for report in reports:
            rec = report.record
            for part in report.parts:
                for w in part.windows:
                    writer.writerow(
                        [rec.song_id, rec.artist, rec.year, rec.generation_index,
                         part.part_index, w.window_index, w.n_samples,
                         _f17(w.width), _f17(w.alpha0), _f17(w.asymmetry),
                         _f17(w.h2), _f17(w.r2_q2),
                         "true" if w.flagged else "false", w.flag_reason or ""]
                    )


def write_generations_csv(reports: list[RenditionReport], path: Path) -> None:
    handle, writer = _open_csv(path)
    with handle:
        writer.writerow(
            ["song_id", "generation", "rendition_count", "part",
             "part_mean_width", "overall_mean_width"]
        )
        for song_id in _song_order(reports):
            table_reports = [r for r in reports if r.record.song_id == song_id]
            for agg in aggregate_generation(table_reports, song_id):
                for p, width in enumerate(agg.part_mean_widths, start=1):
                    writer.writerow(
                        [song_id, agg.generation_index, agg.rendition_count,
                         p, _f17(width), _f17(agg.overall_mean_width)]
                    )


def write_spectrum_csv(report: RenditionReport, path: Path) -> None:
    handle, writer = _open_csv(path)
    with handle:
        writer.writerow(["q", "h", "tau", "alpha", "f_alpha"])
        if report.mean_h is None:
            return
        curve = HurstCurve(
            report.q_grid, report.mean_h,
            np.zeros_like(report.mean_h), np.ones_like(report.mean_h),
        )
        spectrum = legendre_spectrum(curve)
        for i, q in enumerate(report.q_grid):
            writer.writerow(
                [_f17(q), _f17(report.mean_h[i]), _f17(spectrum.tau[i]),
                 _f17(spectrum.alpha[i]), _f17(spectrum.f_alpha[i])]
            )


def _song_order(reports: list[RenditionReport]) -> list[str]:
    order: list[str] = []
    for report in reports:
        if report.record.song_id not in order:
            order.append(report.record.song_id)
    return order


def emit_plot_data(reports: list[RenditionReport], out_dir: Path) -> list[Path]:
    """Long-format (song, generation, part, mean_width) CSVs.

    One file per song plus one combined file; the values equal the
    cross-generation table entries exactly.
    """
    written: list[Path] = []
    combined_rows: list[list] = []
    for song_id in _song_order(reports):
        table = cross_generation_table([r for r in reports if r.record.song_id == song_id])
        rows = []
        for g_idx, gen in enumerate(table.generation_indices):
            for p in range(table.mean_widths.shape[1]):
                rows.append([song_id, gen, p + 1, _f17(table.mean_widths[g_idx, p])])
        combined_rows.extend(rows)
        path = out_dir / f"plot_{_slug(song_id)}.csv"
        handle, writer = _open_csv(path)
        with handle:
            writer.writerow(["song_id", "generation", "part", "mean_width"])
            writer.writerows(rows)
        written.append(path)

    path = out_dir / "plot_all_songs.csv"
    handle, writer = _open_csv(path)
    with handle:
        writer.writerow(["song_id", "generation", "part", "mean_width"])
        writer.writerows(combined_rows)
    written.append(path)
    return written


def write_outputs(reports: list[RenditionReport], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_widths_csv(reports, out_dir / "widths.csv")
    write_windows_csv(reports, out_dir / "windows.csv")
    write_generations_csv(reports, out_dir / "generations.csv")
    for report in reports:
        write_spectrum_csv(report, out_dir / f"spectrum_{report.record.rendition_id}.csv")
    emit_plot_data(reports, out_dir)


def _cmd_run(args) -> int:
    cli_plan: dict = {}
    if args.parts is not None:
        cli_plan["part_count"] = args.parts
        cli_plan["part_length"] = None  # derive clip_length / part_count
    if args.window_seconds is not None:
        cli_plan["window_length"] = args.window_seconds

    cli_mfdfa: dict = {}
    if args.q_min is not None:
        cli_mfdfa["q_min"] = args.q_min
    if args.q_max is not None:
        cli_mfdfa["q_max"] = args.q_max
    if args.q_step is not None:
        cli_mfdfa["q_step"] = args.q_step
    if args.scales is not None:
        cli_mfdfa["scales"] = args.scales
    if args.detrend_order is not None:
        cli_mfdfa["detrend_order"] = args.detrend_order
    if args.width_method is not None:
        cli_mfdfa["width_method"] = args.width_method

    try:
        manifest = validate_manifest(args.manifest, cli_plan or None, cli_mfdfa or None)
    except ManifestError as err:
        for violation in err.violations:
            print(f"manifest error: {violation}", file=sys.stderr)
        return 2

    if args.dry_run:
        print(f"manifest OK: {len(manifest.records)} entr{'y' if len(manifest.records) == 1 else 'ies'}")
        return 0

    out_dir = Path(
        args.out
        or manifest.output_dir
        or os.environ.get("MFAUDIO_OUT")
        or "mfaudio-out"
    )
    if not out_dir.is_absolute() and args.out is None and manifest.output_dir is not None:
        out_dir = manifest.source_path.parent / out_dir

    outcomes, failures = run_corpus(manifest, jobs=args.jobs)
    reports = [o for o in outcomes if isinstance(o, RenditionReport)]

    try:
        write_outputs(reports, out_dir)
    except OSError as err:
        print(f"output error: {err}", file=sys.stderr)
        return 2

    for report in reports:
        if report.errored:
            bad = [p.part_index for p in report.parts if p.errored]
            reasons = {
                w.flag_reason for p in report.parts for w in p.windows if w.flagged
            }
            detail = sorted(reasons)[0] if reasons else "all windows flagged"
            print(
                f"error: rendition {report.record.rendition_id}: "
                f"part(s) {bad} errored ({detail})",
                file=sys.stderr,
            )
    for failure in failures:
        print(f"error: {failure}", file=sys.stderr)

    n_errored = len(failures) + sum(1 for r in reports if r.errored)
    print(f"analyzed {len(reports)}/{len(outcomes)} renditions -> {out_dir}")
    return 1 if n_errored else 0


def _cmd_synth(args) -> int:
    out = Path(args.out)
    (out / "audio").mkdir(parents=True, exist_ok=True)
    n = int(round(args.duration * args.rate))
    if args.parts * args.window_seconds > args.duration:
        print("synth error: parts * window-seconds exceeds duration", file=sys.stderr)
        return 2

    entries = []
    for g in range(1, args.generations + 1):
        seed = args.seed + g
        if args.kind == "cascade-noise":
            weight = min(0.60 + 0.04 * (g - 1), 0.78)
            sig = gen_cascade_noise(n, weight, seed, args.rate)
        elif args.kind == "fgn":
            hurst = min(0.55 + 0.05 * (g - 1), 0.90)
            sig = gen_fgn_prefix(hurst, n, seed, args.rate)
        else:  # pure cascade measure, scaled to unit mean
            levels = max(10, min(24, math.ceil(math.log2(n))))
            masses = np.resize(cascade_masses(levels, 0.75), n)  # tiled past 2^24
            sig = Signal(masses * 2.0**levels, args.rate)
        rel = f"audio/gen{g:02d}.wav"
        write_wav(out / rel, sig, "float32")
        entries.append(
            {
                "song_id": f"synth-{args.kind}",
                "artist": f"synthetic-generation-{g}",
                "year": 1900 + g,
                "generation": g,
                "path": rel,
            }
        )

    manifest = {
        "version": 1,
        "defaults": {
            "window_plan": {
                "clip_start": 0.0,
                "clip_length": args.duration,
                "part_count": args.parts,
                "part_length": args.duration / args.parts,
                "window_length": args.window_seconds,
            },
            "mfdfa": {},
        },
        "entries": entries,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(entries)} WAV(s) and {manifest_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfaudio",
        description="Multifractal spectral-width analysis of audio corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="analyze a corpus manifest and emit CSV tables")
    run_p.add_argument("--manifest", required=True, help="path to the corpus manifest (JSON)")
    run_p.add_argument("--out", default=None, help="output directory (default: manifest output_dir, $MFAUDIO_OUT, or ./mfaudio-out)")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel renditions (outputs are identical for any value)")
    run_p.add_argument("--dry-run", action="store_true", help="validate the manifest and exit")
    run_p.add_argument("--q-min", type=float, default=None)
    run_p.add_argument("--q-max", type=float, default=None)
    run_p.add_argument("--q-step", type=float, default=None)
    run_p.add_argument("--scales", default=None, metavar="MIN:MAX:COUNT", help="log-spaced scale grid rule")
    run_p.add_argument("--detrend-order", type=int, default=None, metavar="M")
    run_p.add_argument("--width-method", choices=["quadratic", "endpoints"], default=None)
    run_p.add_argument("--parts", type=int, default=None, metavar="K", help="parts per clip (part length becomes clip_length/K)")
    run_p.add_argument("--window-seconds", type=float, default=None, metavar="S")
    run_p.set_defaults(func=_cmd_run)

    synth_p = sub.add_parser("synth", help="generate a synthetic oracle corpus (WAVs + manifest)")
    synth_p.add_argument("--out", required=True, help="corpus directory to create")
    synth_p.add_argument("--kind", choices=["cascade-noise", "fgn", "cascade"], default="cascade-noise")
    synth_p.add_argument("--generations", type=int, default=5)
    synth_p.add_argument("--duration", type=float, default=180.0, help="seconds per rendition")
    synth_p.add_argument("--rate", type=float, default=22050.0, help="sample rate in Hz")
    synth_p.add_argument("--parts", type=int, default=6)
    synth_p.add_argument("--window-seconds", type=float, default=6.0)
    synth_p.add_argument("--seed", type=int, default=0)
    synth_p.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
