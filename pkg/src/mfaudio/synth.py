"""Seed-deterministic synthetic signals with known scaling behaviour.

These generators are the verification bedrock for the analysis core:
their Hurst exponents and singularity spectra are known in closed form,
so measured values can be checked against analytic truth.

Randomness comes exclusively from numpy's PCG64 bit generator, fixed
here by name so one (algorithm, seed) pair reproduces the same sequence
on every platform; frozen draw vectors are pinned in the test suite.

- white Gaussian noise: uncorrelated, h(2) = 0.5
- fractional Gaussian noise (fGn) with autocovariance
      gamma(k) = 0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}),
  sampled exactly by circulant embedding (Davies & Harte 1987); if the
  embedding eigenvalues go negative the generator falls back to the
  sequential conditional recursion of Hosking (1984)
- the deterministic binomial multiplicative cascade, whose generalized
  Hurst exponent has the closed form
      h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2)
- cascade-modulated Gaussian noise: a stationary, music-like test signal
  (noise carrier with multifractal amplitude envelope)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .signal_io import Signal

_LN2 = math.log(2.0)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class FgnSpec:
    """Fractional Gaussian noise request: Hurst exponent, length, seed.

    The length must be a power of two so the circulant embedding stays
    exact and cheap.
    """

    hurst: float
    length: int
    seed: int

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ConfigError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.length < 2 or self.length & (self.length - 1):
            raise ConfigError(f"length must be a power of two >= 2, got {self.length}")


@dataclass(frozen=True)
class CascadeSpec:
    """Binomial cascade request: 2^levels cells, left-mass fraction ``weight``."""

    levels: int
    weight: float

    def __post_init__(self):
        if not 10 <= self.levels <= 24:
            raise ConfigError(f"levels must lie in [10, 24], got {self.levels}")
        if not 0.5 < self.weight < 1.0:
            raise ConfigError(f"weight must lie in (0.5, 1), got {self.weight}")


def gen_white_noise(n: int, seed: int, sample_rate: float = 1.0) -> Signal:
    """i.i.d. standard Gaussian samples."""
    if n < 2:
        raise ConfigError(f"need at least 2 samples, got {n}")
    return Signal(_rng(seed).standard_normal(n), sample_rate)


def fgn_autocovariance(hurst: float, lags) -> np.ndarray:
    """gamma(k) = 0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})."""
    k = np.asarray(lags, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * (
        np.abs(k + 1) ** two_h - 2.0 * np.abs(k) ** two_h + np.abs(k - 1) ** two_h
    )


def gen_fgn(spec: FgnSpec, sample_rate: float = 1.0, method: str = "auto") -> Signal:
    """Unit-variance fractional Gaussian noise.

    ``method`` is "auto" (circulant embedding with Hosking fallback),
    "circulant", or "hosking".
    """
    if method not in ("auto", "circulant", "hosking"):
        raise ConfigError(f"unknown fGn method {method!r}")
    if method != "hosking":
        samples = _fgn_circulant(spec)
        if samples is not None:
            return Signal(samples, sample_rate)
        if method == "circulant":
            raise ConfigError(
                f"circulant embedding is not positive semidefinite for H={spec.hurst}, "
                f"n={spec.length}"
            )
    return Signal(_fgn_hosking(spec), sample_rate)


def _fgn_circulant(spec: FgnSpec) -> np.ndarray | None:
    n = spec.length
    gamma = fgn_autocovariance(spec.hurst, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])  # circulant first row, length 2n
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        return None
    lam = np.clip(lam, 0.0, None)

    m = 2 * n
    rng = _rng(spec.seed)
    u = rng.standard_normal(n + 1)
    v = rng.standard_normal(n - 1)
    w = np.zeros(m, dtype=complex)
    w[0] = math.sqrt(lam[0] / m) * u[0]
    w[n] = math.sqrt(lam[n] / m) * u[n]
    w[1:n] = np.sqrt(lam[1:n] / (2.0 * m)) * (u[1:n] + 1j * v)
    w[n + 1 :] = np.conj(w[n - 1 : 0 : -1])
    return np.fft.fft(w).real[:n]


def _fgn_hosking(spec: FgnSpec) -> np.ndarray:
    """Durbin-Levinson conditional sampling; exact but O(n^2)."""
    n = spec.length
    gamma = fgn_autocovariance(spec.hurst, np.arange(n))
    z = _rng(spec.seed).standard_normal(n)
    x = np.empty(n)
    phi = np.zeros(n)
    var = gamma[0]
    x[0] = z[0] * math.sqrt(var)
    for t in range(1, n):
        if t == 1:
            k = gamma[1] / gamma[0]
        else:
            k = (gamma[t] - phi[: t - 1] @ gamma[t - 1 : 0 : -1]) / var
        head = phi[: t - 1].copy()
        phi[: t - 1] = head - k * head[::-1]
        phi[t - 1] = k
        var *= 1.0 - k * k
        x[t] = phi[:t] @ x[t - 1 :: -1] + math.sqrt(var) * z[t]
    return x


def gen_fgn_prefix(hurst: float, n: int, seed: int, sample_rate: float = 1.0) -> Signal:
    """fGn of arbitrary length: the next power of two is generated and
    truncated (stationarity makes the prefix exact fGn)."""
    if n < 2:
        raise ConfigError(f"need at least 2 samples, got {n}")
    length = 1 << max(1, math.ceil(math.log2(n)))
    base = gen_fgn(FgnSpec(hurst, length, seed))
    return Signal(base.samples[:n], sample_rate)


def cascade_masses(levels: int, weight: float) -> np.ndarray:
    """Cell masses of the binomial measure after ``levels`` splits.

    Mass 1 on [0, 1) is split left/right into fractions (a, 1 - a) at
    every level; the 2^levels cell masses sum to 1.
    """
    if levels < 1:
        raise ConfigError(f"levels must be >= 1, got {levels}")
    if not 0.0 < weight < 1.0:
        raise ConfigError(f"weight must lie in (0, 1), got {weight}")
    masses = np.array([1.0])
    split = np.array([weight, 1.0 - weight])
    for _ in range(levels):
        masses = np.kron(masses, split)
    return masses


def gen_binomial_cascade(spec: CascadeSpec, sample_rate: float = 1.0) -> Signal:
    """Deterministic binomial measure, emitted as the cell-mass series."""
    return Signal(cascade_masses(spec.levels, spec.weight), sample_rate)


def analytic_cascade_h(q, weight: float):
    """Closed-form generalized Hurst exponent of the binomial cascade.

    h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2) for |q| > 0, with the
    q -> 0 limit -(ln a + ln(1-a)) / (2 ln 2).  Scalar in, scalar out.
    """
    if not 0.5 < weight < 1.0:
        raise ConfigError(f"weight must lie in (0.5, 1), got {weight}")
    a, b = weight, 1.0 - weight
    qv = np.atleast_1d(np.asarray(q, dtype=float))
    out = np.empty_like(qv)
    small = np.abs(qv) <= 1e-9
    out[small] = -(math.log(a) + math.log(b)) / (2.0 * _LN2)
    qs = qv[~small]
    out[~small] = 1.0 / qs - np.log(a**qs + b**qs) / (qs * _LN2)
    return float(out[0]) if np.isscalar(q) else out


def analytic_cascade_alpha(q, weight: float):
    """Closed-form singularity strength of the binomial cascade.

    alpha(q) = -(a^q ln a + b^q ln b) / ((a^q + b^q) ln 2), b = 1 - a.
    """
    if not 0.5 < weight < 1.0:
        raise ConfigError(f"weight must lie in (0.5, 1), got {weight}")
    a, b = weight, 1.0 - weight
    qv = np.atleast_1d(np.asarray(q, dtype=float))
    aq, bq = a**qv, b**qv
    alpha = -(aq * math.log(a) + bq * math.log(b)) / ((aq + bq) * _LN2)
    return float(alpha[0]) if np.isscalar(q) else alpha


def shuffle(signal: Signal, seed: int) -> Signal:
    """Uniform random permutation of the samples.

    The value multiset is preserved exactly while long-range correlation
    is destroyed, which is the classic surrogate test: a shuffled series
    should come out with h(2) near 0.5.
    """
    perm = _rng(seed).permutation(signal.samples.size)
    return Signal(signal.samples[perm], signal.sample_rate)


def gen_cascade_noise(
    n: int,
    weight: float,
    seed: int,
    sample_rate: float = 1.0,
    envelope_power: float = 0.5,
) -> Signal:
    """Gaussian noise amplitude-modulated by a binomial-cascade envelope.

    The envelope is the cascade mass series scaled to unit mean and
    raised to ``envelope_power`` (lower values soften the modulation).
    The result is a stationary-carrier signal with music-like burstiness
    and a genuinely multifractal amplitude structure, usable at any
    length.
    """
    if n < 2:
        raise ConfigError(f"need at least 2 samples, got {n}")
    if not 0.5 < weight < 1.0:
        raise ConfigError(f"weight must lie in (0.5, 1), got {weight}")
    levels = max(1, math.ceil(math.log2(n)))
    masses = cascade_masses(levels, weight)[:n]
    envelope = (masses * 2.0**levels) ** envelope_power
    noise = _rng(seed).standard_normal(n)
    return Signal(noise * envelope, sample_rate)
