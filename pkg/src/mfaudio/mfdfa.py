"""Multifractal detrended fluctuation analysis (MFDFA).

The pipeline follows the standard formulation of Kantelhardt et al.,
Physica A 316 (2002) 87-114, with DFA detrending after Peng et al. (1994):

1. profile       Y(i) = sum_{k<=i} (x_k - mean(x))
2. fluctuation   F^2(s, v) = mean squared residual of a least-squares
                 polynomial of degree m over segment v of size s;
                 segments are taken from the start of the profile and,
                 when ``bidirectional``, from the end as well
3. q-order mean  F_q(s) = { mean_v [F^2(s, v)]^(q/2) }^(1/q)
                 F_0(s) = exp{ 0.5 * mean_v ln F^2(s, v) }
4. scaling       F_q(s) ~ s^h(q), fitted by OLS in ln-ln space
5. spectrum      tau(q) = q h(q) - 1;  alpha = h + q h';
                 f(alpha) = q (alpha - h) + 1
6. width         W = alpha_1 - alpha_2, the root separation of the
                 quadratic A (alpha - alpha_0)^2 + B (alpha - alpha_0) + C
                 fitted around the spectrum apex with C pinned to 1

Natural logarithms are used throughout, and every reduction sums in fixed
input order, so results are bit-identical regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    DegenerateSegmentError,
    EmptySignalError,
    InsufficientScalesError,
    InsufficientSpectrumError,
    MfaudioError,
    NonConcaveSpectrumError,
    NonFiniteDataError,
)
from .signal_io import Signal

DEFAULT_MIN_SCALE = 16
DEFAULT_SCALE_COUNT = 20


def default_q_grid() -> np.ndarray:
    """-5 .. +5 in steps of 0.25; contains 0 and 2 exactly."""
    return np.linspace(-5.0, 5.0, 41)


def default_scale_grid(
    n: int, count: int = DEFAULT_SCALE_COUNT, min_scale: int = DEFAULT_MIN_SCALE
) -> np.ndarray:
    """Log-spaced integer scales covering [min_scale, n // 4]."""
    max_scale = n // 4
    if max_scale < min_scale:
        raise ConfigError(
            f"series of length {n} is too short for scales >= {min_scale} "
            f"(needs at least {4 * min_scale} samples)"
        )
    return np.unique(np.rint(np.geomspace(min_scale, max_scale, count)).astype(int))


@dataclass(frozen=True, eq=False)
class MfdfaConfig:
    """Knobs of the analysis; every default is overridable.

    ``scale_grid=None`` resolves to ``default_scale_grid(len(profile))``
    at analysis time, so one config can serve windows of different sizes.
    ``fit_range`` is a half-open index range into the scale grid.
    """

    q_grid: np.ndarray | Sequence[float] | None = None
    scale_grid: np.ndarray | Sequence[int] | None = None
    detrend_order: int = 1
    bidirectional: bool = True
    fit_range: tuple[int, int] | None = None
    width_method: str = "quadratic"  # "quadratic" | "endpoints"
    q_zero_epsilon: float = 1e-9

    def __post_init__(self):
        q = default_q_grid() if self.q_grid is None else np.asarray(self.q_grid, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ConfigError("q_grid must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(q)):
            raise ConfigError("q_grid must be finite")
        if np.any(np.diff(q) <= 0):
            raise ConfigError("q_grid must be strictly increasing")
        if not np.any(np.abs(q - 2.0) < 1e-9):
            raise ConfigError("q_grid must include q = 2")
        object.__setattr__(self, "q_grid", q)

        if self.detrend_order < 1:
            raise ConfigError(f"detrend_order must be >= 1, got {self.detrend_order}")
        if self.scale_grid is not None:
            s = np.asarray(self.scale_grid)
            if s.ndim != 1 or s.size == 0 or not np.all(s == np.floor(s)):
                raise ConfigError("scale_grid must be a 1-D sequence of integers")
            s = s.astype(int)
            if np.any(np.diff(s) <= 0):
                raise ConfigError("scale_grid must be strictly increasing")
            if s[0] < self.detrend_order + 2:
                raise ConfigError(
                    f"scale {s[0]} leaves no residual degree of freedom for "
                    f"order-{self.detrend_order} detrending (need s >= m + 2)"
                )
            object.__setattr__(self, "scale_grid", s)
        if self.width_method not in ("quadratic", "endpoints"):
            raise ConfigError(f"unknown width_method {self.width_method!r}")
        if not self.q_zero_epsilon > 0:
            raise ConfigError("q_zero_epsilon must be > 0")
        if self.fit_range is not None:
            lo, hi = self.fit_range
            if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo < hi):
                raise ConfigError(f"fit_range {self.fit_range!r} is not a valid index range")

    def scales_for(self, n: int) -> np.ndarray:
        """Concrete scale grid for a profile of length n, fully validated.

        Enforcing max(s) <= n // 4 also guarantees the minimum signal
        length of 4 * min(s).
        """
        scales = default_scale_grid(n) if self.scale_grid is None else self.scale_grid
        if scales[0] < self.detrend_order + 2:
            raise ConfigError(
                f"scale {scales[0]} leaves no residual degree of freedom for "
                f"order-{self.detrend_order} detrending"
            )
        if scales[-1] > n // 4:
            raise ConfigError(
                f"scale {scales[-1]} exceeds N/4 = {n // 4} for a series of length {n}"
            )
        lo, hi = self.fit_indices(scales.size)
        if hi - lo < 4:
            raise InsufficientScalesError(
                f"fit range holds {hi - lo} scales, regression needs >= 4"
            )
        return scales

    def fit_indices(self, n_scales: int) -> tuple[int, int]:
        if self.fit_range is None:
            return 0, n_scales
        lo, hi = self.fit_range
        if hi > n_scales:
            raise ConfigError(
                f"fit_range {self.fit_range} is outside the {n_scales}-scale grid"
            )
        return lo, hi


@dataclass(frozen=True, eq=False)
class Profile:
    """Cumulative sum of mean-subtracted samples (random-walk-like series).

    Deviations from the mean sum to zero, so the final value is 0 up to
    rounding.
    """

    values: np.ndarray


@dataclass(frozen=True, eq=False)
class FluctuationSurface:
    """F_q(s) over a q-grid and a scale grid, all entries finite and > 0."""

    q_grid: np.ndarray
    scale_grid: np.ndarray
    values: np.ndarray  # shape (len(q_grid), len(scale_grid))
    segment_counts: np.ndarray  # segments entering the mean, per scale


@dataclass(frozen=True, eq=False)
class HurstCurve:
    """Generalized Hurst exponent h(q) with per-q regression diagnostics."""

    q_grid: np.ndarray
    h: np.ndarray
    intercepts: np.ndarray
    r_squared: np.ndarray

    def at(self, q: float) -> tuple[float, float]:
        """(h, r^2) at grid point q; q must lie on the grid."""
        i = int(np.argmin(np.abs(self.q_grid - q)))
        if abs(self.q_grid[i] - q) > 1e-9:
            raise ConfigError(f"q = {q:g} is not on the analysis grid")
        return float(self.h[i]), float(self.r_squared[i])


@dataclass(frozen=True, eq=False)
class SingularitySpectrum:
    """tau(q), singularity strengths alpha(q), and dimensions f(alpha).

    ``alpha_monotone`` records whether alpha is non-increasing in q;
    finite-size noise may break monotonicity, which is permitted but
    worth surfacing.
    """

    q_grid: np.ndarray
    tau: np.ndarray
    alpha: np.ndarray
    f_alpha: np.ndarray
    alpha_monotone: bool


@dataclass(frozen=True, eq=False)
class WidthResult:
    """Multifractal spectral width and apex diagnostics.

    For the quadratic method, ``quad_coefficients`` holds (A, B, C) with
    C pinned to 1 and A < 0; ``asymmetry`` is B (zero for a perfectly
    symmetric spectrum).  The endpoints method leaves both unset.
    """

    width: float
    alpha0: float
    asymmetry: float
    method: str
    quad_coefficients: tuple[float, float, float] | None = None


@dataclass(frozen=True, eq=False)
class MfdfaResult:
    profile: Profile
    surface: FluctuationSurface
    hurst: HurstCurve
    spectrum: SingularitySpectrum
    width: WidthResult


def _as_samples(signal) -> np.ndarray:
    if isinstance(signal, Signal):
        return signal.samples
    return np.asarray(signal, dtype=np.float64)


def compute_profile(signal) -> Profile:
    """Integrate mean-subtracted samples into the analysis profile."""
    x = _as_samples(signal)
    if x.size == 0:
        raise EmptySignalError("cannot profile an empty series")
    if not np.all(np.isfinite(x)):
        raise NonFiniteDataError("series contains NaN or infinity")
    return Profile(np.cumsum(x - x.mean()))


def _design_matrix(s: int, order: int) -> np.ndarray:
    # Abscissae scaled to [-1, 1]: shifts/scales leave least-squares
    # residuals unchanged but keep the Vandermonde well conditioned.
    x = (2.0 * np.arange(s) - (s - 1)) / max(s - 1, 1)
    return np.polynomial.polynomial.polyvander(x, order)


def _segment_msq(segments: np.ndarray, order: int) -> np.ndarray:
    """Mean squared residual of a degree-``order`` LS fit, per row."""
    design = _design_matrix(segments.shape[1], order)
    coef = np.linalg.lstsq(design, segments.T, rcond=None)[0]
    resid = segments.T - design @ coef
    return np.mean(resid * resid, axis=0)


def segment_fluctuation(
    profile: Profile, s: int, v: int, order: int = 1, direction: str = "forward"
) -> float:
    """Detrended fluctuation F^2(s, v) of one profile segment.

    Segments are 1-based; ``forward`` counts them from the start of the
    profile, ``backward`` from the end.
    """
    y = profile.values
    n_seg = y.size // s
    if s < order + 2:
        raise ConfigError(f"scale {s} too small for order-{order} detrending")
    if not 1 <= v <= n_seg:
        raise ConfigError(f"segment v={v} outside 1..{n_seg} at scale s={s}")
    if direction == "forward":
        block = y[(v - 1) * s : v * s]
    elif direction == "backward":
        block = y[y.size - v * s : y.size - (v - 1) * s]
    else:
        raise ConfigError(f"unknown direction {direction!r}")
    return float(_segment_msq(block[np.newaxis, :], order)[0])


def q_order_means(fluctuations, q_grid, q_zero_epsilon: float = 1e-9) -> np.ndarray:
    """q-order overall RMS variation of a set of segment fluctuations.

    ``fluctuations`` are the squared residual means F^2(s, v).  Orders
    with |q| <= q_zero_epsilon use the logarithmic-average limit.  The
    moments are evaluated through log-sum-exp so extreme q neither
    overflow nor underflow.
    """
    msq = np.asarray(fluctuations, dtype=float)
    q = np.atleast_1d(np.asarray(q_grid, dtype=float))
    if np.any(msq <= 0):
        raise ConfigError("q-order means need strictly positive fluctuations")
    logs = np.log(msq)
    out = np.empty(q.size)
    near_zero = np.abs(q) <= q_zero_epsilon
    if near_zero.any():
        out[near_zero] = math.exp(0.5 * logs.mean())
    rest = ~near_zero
    if rest.any():
        z = 0.5 * np.outer(q[rest], logs)
        zmax = z.max(axis=1)
        lse = zmax + np.log(np.exp(z - zmax[:, np.newaxis]).sum(axis=1))
        out[rest] = np.exp((lse - math.log(logs.size)) / q[rest])
    return out


def fluctuation_function(profile: Profile, config: MfdfaConfig | None = None) -> FluctuationSurface:
    """q-order fluctuation F_q(s) over the configured scale grid.

    Raises DegenerateSegmentError, naming the offending (s, v), if any
    segment fluctuation is exactly zero: negative-q moments diverge on
    digital silence.
    """
    config = config if config is not None else MfdfaConfig()
    y = profile.values
    scales = config.scales_for(y.size)
    q = config.q_grid
    values = np.empty((q.size, scales.size))
    counts = np.empty(scales.size, dtype=int)
    for j, s in enumerate(scales):
        msq = _scale_fluctuations(y, int(s), config)
        zero = np.flatnonzero(msq == 0.0)
        if zero.size:
            v = int(zero[0])
            n_seg = y.size // int(s)
            if v < n_seg:
                raise DegenerateSegmentError(int(s), v + 1, "forward")
            raise DegenerateSegmentError(int(s), v - n_seg + 1, "backward")
        counts[j] = msq.size
        values[:, j] = q_order_means(msq, q, config.q_zero_epsilon)
    if not np.all(np.isfinite(values)):
        raise NonFiniteDataError("fluctuation function overflowed; rescale the input")
    return FluctuationSurface(q, scales, values, counts)


def _scale_fluctuations(y: np.ndarray, s: int, config: MfdfaConfig) -> np.ndarray:
    n_seg = y.size // s
    fwd = y[: n_seg * s].reshape(n_seg, s)
    msq = _segment_msq(fwd, config.detrend_order)
    if config.bidirectional:
        # backward segments count from the end of the profile; order them
        # v = 1..n_seg from the end so trailing samples are always covered
        bwd = y[y.size - n_seg * s :].reshape(n_seg, s)[::-1]
        msq = np.concatenate([msq, _segment_msq(bwd, config.detrend_order)])
    return msq


def fit_hurst(surface: FluctuationSurface, fit_range: tuple[int, int] | None = None) -> HurstCurve:
    """Per-q OLS of ln F_q(s) on ln s; the slope is h(q)."""
    n_scales = surface.scale_grid.size
    lo, hi = (0, n_scales) if fit_range is None else fit_range
    if not (0 <= lo < hi <= n_scales):
        raise ConfigError(f"fit range ({lo}, {hi}) is outside the {n_scales}-scale grid")
    if hi - lo < 4:
        raise InsufficientScalesError(f"{hi - lo} scales in the fit range, need >= 4")
    x = np.log(surface.scale_grid[lo:hi].astype(float))
    ymat = np.log(surface.values[:, lo:hi])

    xc = x - x.mean()
    denom = float(xc @ xc)
    ymean = ymat.mean(axis=1)
    yc = ymat - ymean[:, np.newaxis]
    slope = (yc @ xc) / denom
    intercept = ymean - slope * x.mean()
    ss_res = np.sum((yc - np.outer(slope, xc)) ** 2, axis=1)
    ss_tot = np.sum(yc * yc, axis=1)
    r2 = np.ones_like(slope)
    nonzero = ss_tot > 0
    r2[nonzero] = 1.0 - ss_res[nonzero] / ss_tot[nonzero]
    return HurstCurve(surface.q_grid, slope, intercept, np.clip(r2, 0.0, 1.0))


def tau_from_h(curve: HurstCurve) -> np.ndarray:
    """Classical multifractal scaling exponent tau(q) = q h(q) - 1."""
    return curve.q_grid * curve.h - 1.0


def _central_differences(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (x[2:] - x[:-2])
    d[0] = (y[1] - y[0]) / (x[1] - x[0])
    d[-1] = (y[-1] - y[-2]) / (x[-1] - x[-2])
    return d


def legendre_spectrum(curve: HurstCurve) -> SingularitySpectrum:
    """Singularity spectrum from h(q).

    alpha = h + q h' and f(alpha) = q (alpha - h) + 1, with h' taken by
    central differences on the q grid (one-sided at the ends) and no
    smoothing of h beforehand.
    """
    q = curve.q_grid
    if q.size < 3:
        raise InsufficientSpectrumError("spectrum needs at least 3 q values")
    if not (q[0] < 0.0 < q[-1]):
        raise ConfigError("spectrum needs a q-grid spanning both signs")
    dh = _central_differences(curve.h, q)
    alpha = curve.h + q * dh
    f_alpha = q * (alpha - curve.h) + 1.0
    monotone = bool(np.all(np.diff(alpha) <= 1e-12))
    return SingularitySpectrum(q, tau_from_h(curve), alpha, f_alpha, monotone)


def spectrum_width(
    spectrum: SingularitySpectrum, method: str = "quadratic", apex_floor: float = 0.5
) -> WidthResult:
    """Multifractal width W of a singularity spectrum.

    quadratic: least-squares fit of f = A u^2 + B u + 1 (u = alpha -
    alpha_0, alpha_0 at the apex) over the points with f >= apex_floor;
    W is the separation of the parabola's roots at f = 0.  endpoints:
    W = max(alpha) - min(alpha) over the q grid (a fallback when the
    fitted parabola is not concave).
    """
    alpha = spectrum.alpha
    f = spectrum.f_alpha
    if np.unique(alpha).size < 3:
        raise InsufficientSpectrumError("need >= 3 distinct alpha values")
    apex = int(np.argmax(f))
    alpha0 = float(alpha[apex])
    if method == "endpoints":
        return WidthResult(float(alpha.max() - alpha.min()), alpha0, math.nan, "endpoints")
    if method != "quadratic":
        raise ConfigError(f"unknown width method {method!r}")

    mask = f >= apex_floor
    u = alpha[mask] - alpha0
    if np.unique(u).size < 2:
        raise InsufficientSpectrumError("apex neighbourhood too narrow for a quadratic fit")
    design = np.column_stack([u * u, u])
    a, b = np.linalg.lstsq(design, f[mask] - 1.0, rcond=None)[0]
    if a >= 0:
        raise NonConcaveSpectrumError(
            f"fitted leading coefficient A = {a:g} is not negative"
        )
    width = math.sqrt(b * b - 4.0 * a) / (-a)  # root separation with C = 1
    return WidthResult(width, alpha0, float(b), "quadratic", (float(a), float(b), 1.0))


def _staged(stage: str, fn, *args):
    try:
        return fn(*args)
    except MfaudioError as err:
        raise err.add_context(f"stage {stage}")


def mfdfa(signal, config: MfdfaConfig | None = None) -> MfdfaResult:
    """Full analysis: profile, fluctuation surface, h(q), spectrum, width.

    Deterministic for fixed inputs; component errors propagate with the
    failing stage named in the message.
    """
    config = config if config is not None else MfdfaConfig()
    profile = _staged("profile", compute_profile, signal)
    surface = _staged("fluctuation", fluctuation_function, profile, config)
    fit_range = config.fit_indices(surface.scale_grid.size)
    hurst = _staged("scaling-fit", fit_hurst, surface, fit_range)
    spectrum = _staged("spectrum", legendre_spectrum, hurst)
    width = _staged("width", spectrum_width, spectrum, config.width_method)
    return MfdfaResult(profile, surface, hurst, spectrum, width)
