"""Corpus manifest: a versioned JSON document listing recordings plus
analysis defaults.

Schema (version 1)::

    {
      "version": 1,
      "output_dir": "out",                # optional, --out overrides
      "defaults": {
        "window_plan": {"clip_start": 0.0, "clip_length": 180.0,
                        "part_count": 6, "part_length": 30.0,
                        "window_length": 6.0},
        "mfdfa": {"q_min": -5.0, "q_max": 5.0, "q_step": 0.25,
                  "scales": "16:4096:20",
                  "detrend_order": 1, "bidirectional": true,
                  "width_method": "quadratic"}
      },
      "entries": [
        {"song_id": "...", "artist": "...", "year": 1986, "generation": 4,
         "path": "audio/take.wav",
         "window_plan": { ... per-entry overrides ... },
         "mfdfa": { ... per-entry overrides ... }}
      ]
    }

Merge precedence, lowest to highest: built-in defaults, manifest
``defaults``, command-line overrides, per-entry settings.  ``mfdfa``
accepts either an explicit ``q_grid`` list or the (q_min, q_max, q_step)
triple, and either an explicit ``scales`` integer list or a
"MIN:MAX:COUNT" log-spacing rule.  A ``part_length`` of null derives
``clip_length / part_count``.

Audio paths are resolved relative to the manifest file.  Validation
reports every violation, not just the first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, ManifestError, MfaudioError
from .mfdfa import MfdfaConfig
from .pipeline import RenditionRecord
from .signal_io import WindowPlan

SUPPORTED_VERSION = 1

_PLAN_KEYS = {"clip_start", "clip_length", "part_count", "part_length", "window_length"}
_MFDFA_KEYS = {
    "q_grid", "q_min", "q_max", "q_step", "scales", "detrend_order",
    "bidirectional", "fit_range", "width_method", "q_zero_epsilon",
}
_ENTRY_KEYS = {"song_id", "artist", "year", "generation", "path", "window_plan", "mfdfa"}


@dataclass(frozen=True)
class Manifest:
    """Validated corpus description: one RenditionRecord per entry."""

    version: int
    records: tuple[RenditionRecord, ...]
    output_dir: str | None
    source_path: Path


def parse_scale_rule(text: str) -> np.ndarray:
    """Expand a "MIN:MAX:COUNT" rule into log-spaced integer scales."""
    try:
        lo, hi, count = (int(part) for part in text.split(":"))
    except ValueError:
        raise ConfigError(f"scales rule {text!r} is not MIN:MAX:COUNT") from None
    if not (0 < lo < hi and count >= 2):
        raise ConfigError(f"scales rule {text!r} needs 0 < MIN < MAX and COUNT >= 2")
    return np.unique(np.rint(np.geomspace(lo, hi, count)).astype(int))


def build_q_grid(q_min: float, q_max: float, q_step: float) -> np.ndarray:
    if not (q_step > 0 and q_max > q_min):
        raise ConfigError(f"invalid q range {q_min}..{q_max} step {q_step}")
    count = int(round((q_max - q_min) / q_step))
    grid = q_min + q_step * np.arange(count + 1)
    if abs(grid[-1] - q_max) > 1e-9:
        raise ConfigError(f"q_step {q_step:g} does not divide the range {q_min:g}..{q_max:g}")
    return grid


def config_from_settings(settings: dict) -> MfdfaConfig:
    """Build an MfdfaConfig from merged manifest/CLI settings."""
    unknown = set(settings) - _MFDFA_KEYS
    if unknown:
        raise ConfigError(f"unknown mfdfa setting(s): {', '.join(sorted(unknown))}")

    q_grid = settings.get("q_grid")
    if q_grid is None and any(k in settings for k in ("q_min", "q_max", "q_step")):
        q_grid = build_q_grid(
            float(settings.get("q_min", -5.0)),
            float(settings.get("q_max", 5.0)),
            float(settings.get("q_step", 0.25)),
        )

    scales = settings.get("scales")
    if isinstance(scales, str):
        scales = parse_scale_rule(scales)

    fit_range = settings.get("fit_range")
    if fit_range is not None:
        fit_range = tuple(int(v) for v in fit_range)

    return MfdfaConfig(
        q_grid=q_grid,
        scale_grid=scales,
        detrend_order=int(settings.get("detrend_order", 1)),
        bidirectional=bool(settings.get("bidirectional", True)),
        fit_range=fit_range,
        width_method=settings.get("width_method", "quadratic"),
        q_zero_epsilon=float(settings.get("q_zero_epsilon", 1e-9)),
    )


def plan_from_settings(settings: dict) -> WindowPlan:
    """Build a WindowPlan from merged settings.

    ``part_length: null`` (or an absent part_length when part_count was
    overridden) derives clip_length / part_count, so "--parts 4" turns a
    180 s clip into 4 x 45 s parts.
    """
    unknown = set(settings) - _PLAN_KEYS
    if unknown:
        raise ConfigError(f"unknown window_plan setting(s): {', '.join(sorted(unknown))}")
    merged = {
        "clip_start": 0.0,
        "clip_length": 180.0,
        "part_count": 6,
        "part_length": 30.0,
        "window_length": 6.0,
    }
    merged.update({k: v for k, v in settings.items()})
    if merged["part_length"] is None:
        merged["part_length"] = float(merged["clip_length"]) / int(merged["part_count"])
    return WindowPlan(
        clip_start=float(merged["clip_start"]),
        clip_length=float(merged["clip_length"]),
        part_count=int(merged["part_count"]),
        part_length=float(merged["part_length"]),
        window_length=float(merged["window_length"]),
    )


def _merge(*layers: dict | None) -> dict:
    out: dict = {}
    for layer in layers:
        if layer:
            out.update(layer)
    return out


def validate_manifest(
    path: str | Path,
    cli_plan: dict | None = None,
    cli_mfdfa: dict | None = None,
) -> Manifest:
    """Parse and validate a manifest, reporting every violation at once.

    ``cli_plan`` / ``cli_mfdfa`` are command-line overrides that sit
    between the manifest defaults and the per-entry settings.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ManifestError(f"{path}: cannot read manifest: {err}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ManifestError(
            f"{path}: parse error at line {err.lineno} column {err.colno}: {err.msg}"
        ) from None

    violations: list[str] = []
    if not isinstance(doc, dict):
        raise ManifestError(f"{path}: manifest root must be a JSON object")

    version = doc.get("version")
    if version != SUPPORTED_VERSION:
        violations.append(f"unsupported manifest version {version!r} (expected {SUPPORTED_VERSION})")

    defaults = doc.get("defaults", {})
    if not isinstance(defaults, dict):
        violations.append("'defaults' must be an object")
        defaults = {}
    default_plan = defaults.get("window_plan", {})
    default_mfdfa = defaults.get("mfdfa", {})

    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        violations.append("'entries' must be a non-empty list")
        entries = []

    records: list[RenditionRecord] = []
    seen: dict[tuple, int] = {}
    for i, entry in enumerate(entries):
        label = f"entries[{i}]"
        if not isinstance(entry, dict):
            violations.append(f"{label}: entry must be an object")
            continue
        unknown = set(entry) - _ENTRY_KEYS
        if unknown:
            violations.append(f"{label}: unknown key(s): {', '.join(sorted(unknown))}")

        missing = [k for k in ("song_id", "artist", "year", "generation", "path") if k not in entry]
        if missing:
            violations.append(f"{label}: missing required key(s): {', '.join(missing)}")
            continue

        triple = (entry["song_id"], entry["artist"], entry["year"])
        if triple in seen:
            violations.append(
                f"{label}: duplicate (song_id, artist, year) {triple!r} "
                f"already defined at entries[{seen[triple]}]"
            )
            continue
        seen[triple] = i

        audio_path = (path.parent / entry["path"]).resolve()
        if not audio_path.is_file():
            violations.append(f"{label}: missing file {audio_path}")
            continue

        try:
            plan = plan_from_settings(_merge(default_plan, cli_plan, entry.get("window_plan")))
            config = config_from_settings(_merge(default_mfdfa, cli_mfdfa, entry.get("mfdfa")))
            record = RenditionRecord(
                song_id=str(entry["song_id"]),
                artist=str(entry["artist"]),
                year=int(entry["year"]),
                generation_index=int(entry["generation"]),
                audio_path=audio_path,
                plan=plan,
                config=config,
            )
        except (MfaudioError, TypeError, ValueError) as err:
            violations.append(f"{label}: {err}")
            continue
        records.append(record)

    if violations:
        raise ManifestError(violations)

    output_dir = doc.get("output_dir")
    return Manifest(SUPPORTED_VERSION, tuple(records), output_dir, path)
