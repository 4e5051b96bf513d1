import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mfaudio import (
    ConfigError,
    DegenerateSegmentError,
    FluctuationSurface,
    HurstCurve,
    InsufficientScalesError,
    InsufficientSpectrumError,
    MfdfaConfig,
    NonConcaveSpectrumError,
    Signal,
    SingularitySpectrum,
    compute_profile,
    default_scale_grid,
    fit_hurst,
    fluctuation_function,
    gen_cascade_noise,
    legendre_spectrum,
    mfdfa,
    q_order_means,
    segment_fluctuation,
    spectrum_width,
    tau_from_h,
)


# --- profile --------------------------------------------------------------

def test_profile_constant_series_is_zero():
    prof = compute_profile(np.array([5.0, 5.0, 5.0]))
    assert np.array_equal(prof.values, [0.0, 0.0, 0.0])


def test_profile_three_point_hand_sum():
    prof = compute_profile(np.array([1.0, 2.0, 3.0]))
    assert np.allclose(prof.values, [-1.0, -1.0, 0.0], atol=1e-15)


def test_profile_endpoint_near_zero():
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.normal(3.0, 2.0, 2**14)
        prof = compute_profile(x)
        assert abs(prof.values[-1]) <= 1e-9 * np.abs(x - x.mean()).sum()


def test_profile_rejects_non_finite():
    from mfaudio import NonFiniteDataError

    with pytest.raises(NonFiniteDataError):
        compute_profile(np.array([1.0, np.inf]))


# --- segment fluctuation ----------------------------------------------------

def test_segment_fluctuation_exact_line_is_zero():
    prof = compute_profile(np.ones(12))  # profile is exactly 0, a line
    assert segment_fluctuation(prof, 4, 1, order=1) == pytest.approx(0.0, abs=1e-18)

    from mfaudio.mfdfa import Profile

    line = Profile(2.5 * np.arange(8.0) - 3.0)
    assert segment_fluctuation(line, 8, 1, order=1) == pytest.approx(0.0, abs=1e-12)


def test_segment_fluctuation_exact_quadratic_is_zero():
    from mfaudio.mfdfa import Profile

    x = np.arange(9.0)
    quad = Profile(0.5 * x * x - 2.0 * x + 1.0)
    assert segment_fluctuation(quad, 9, 1, order=2) == pytest.approx(0.0, abs=1e-12)


def test_segment_fluctuation_hand_computed_normal_equations():
    # values (0, 1, 0): best order-1 fit is the constant 1/3,
    # residuals (-1/3, 2/3, -1/3), mean square 2/9
    from mfaudio.mfdfa import Profile

    prof = Profile(np.array([0.0, 1.0, 0.0]))
    assert segment_fluctuation(prof, 3, 1, order=1) == pytest.approx(2.0 / 9.0, abs=1e-12)


def test_segment_fluctuation_directions():
    from mfaudio.mfdfa import Profile

    prof = Profile(np.array([0.0, 1.0, 0.0, 7.0, 7.0, 7.0]))
    fwd = segment_fluctuation(prof, 3, 1, direction="forward")
    bwd = segment_fluctuation(prof, 3, 1, direction="backward")
    assert fwd == pytest.approx(2.0 / 9.0, abs=1e-12)
    assert bwd == pytest.approx(0.0, abs=1e-15)  # trailing constant block
    # v=2 backward is the leading block
    assert segment_fluctuation(prof, 3, 2, direction="backward") == pytest.approx(
        2.0 / 9.0, abs=1e-12
    )
    with pytest.raises(ConfigError):
        segment_fluctuation(prof, 3, 3)


# --- q-order means ----------------------------------------------------------

def test_q_order_means_constant_fluctuations():
    q = np.linspace(-5, 5, 41)
    vals = q_order_means(np.full(7, 4.0), q)
    assert np.allclose(vals, 2.0, rtol=1e-12)


def test_q_order_means_geometric_mean_fixture():
    # two segments with F^2 in {1, e^2}: F_0 = exp(0.5) (geometric mean of
    # the RMS values 1 and e)
    vals = q_order_means([1.0, math.e**2], [0.0])
    assert vals[0] == pytest.approx(math.exp(0.5), rel=1e-12)


def test_q_order_means_power_mean_inequality():
    rng = np.random.default_rng(3)
    q = np.linspace(-5, 5, 41)
    for _ in range(50):
        msq = rng.lognormal(0.0, 1.5, rng.integers(2, 40))
        vals = q_order_means(msq, q)
        assert np.all(np.diff(vals) >= 0)


@settings(max_examples=200, deadline=None)
@given(
    arrays(
        np.float64,
        st.integers(2, 30),
        elements=st.floats(1e-6, 1e6),
    )
)
def test_q_order_means_monotone_property(msq):
    q = np.linspace(-4, 4, 17)
    vals = q_order_means(msq, q)
    assert np.all(np.diff(vals) >= -1e-12 * vals[:-1])


# --- fluctuation function ----------------------------------------------------

def test_fluctuation_function_matches_per_segment_route():
    # the vectorized surface must agree with the one-segment operation
    rng = np.random.default_rng(8)
    sig = rng.standard_normal(256)
    prof = compute_profile(sig)
    config = MfdfaConfig(scale_grid=[8, 16, 32, 64], q_grid=[-2.0, 0.0, 2.0])
    surface = fluctuation_function(prof, config)
    for j, s in enumerate(surface.scale_grid):
        n_seg = prof.values.size // s
        msq = [segment_fluctuation(prof, int(s), v, 1, "forward") for v in range(1, n_seg + 1)]
        msq += [segment_fluctuation(prof, int(s), v, 1, "backward") for v in range(1, n_seg + 1)]
        expected = q_order_means(msq, config.q_grid)
        assert np.allclose(surface.values[:, j], expected, rtol=1e-12)
        assert surface.segment_counts[j] == 2 * n_seg


def test_fluctuation_function_unidirectional_counts():
    prof = compute_profile(np.random.default_rng(1).standard_normal(256))
    config = MfdfaConfig(scale_grid=[8, 16, 32, 64], bidirectional=False)
    surface = fluctuation_function(prof, config)
    assert list(surface.segment_counts) == [32, 16, 8, 4]


def test_digital_silence_is_degenerate():
    sig = Signal(np.zeros(4096), 100.0)
    with pytest.raises(DegenerateSegmentError) as err:
        mfdfa(sig)
    assert err.value.scale >= 16
    assert err.value.segment >= 1
    assert "s=" in str(err.value) and "v=" in str(err.value)


# --- scaling fit ---------------------------------------------------------------

def test_fit_hurst_exact_power_law():
    scales = np.array([16, 32, 64, 128])
    q = np.array([-2.0, 0.0, 2.0])
    values = np.vstack([scales**0.5] * 3).astype(float)
    surface = FluctuationSurface(q, scales, values, np.full(4, 8))
    curve = fit_hurst(surface)
    assert np.allclose(curve.h, 0.5, atol=1e-12)
    assert np.allclose(curve.r_squared, 1.0, atol=1e-12)


def test_fit_hurst_needs_four_scales():
    scales = np.array([16, 32, 64])
    surface = FluctuationSurface(
        np.array([2.0]), scales, np.array([[4.0, 5.0, 6.0]]), np.full(3, 4)
    )
    with pytest.raises(InsufficientScalesError):
        fit_hurst(surface)


def test_fit_range_restricts_regression():
    scales = np.array([8, 16, 32, 64, 128, 256])
    # power law with a corrupted first point; fitting [1, 6) ignores it
    vals = scales.astype(float) ** 0.7
    vals[0] *= 10.0
    surface = FluctuationSurface(np.array([2.0]), scales, vals[np.newaxis, :], np.full(6, 4))
    full = fit_hurst(surface)
    tail = fit_hurst(surface, (1, 6))
    assert abs(tail.h[0] - 0.7) < 1e-12
    assert abs(full.h[0] - 0.7) > 0.1


# --- tau and spectrum ------------------------------------------------------------

def test_fit_range_flows_through_config():
    x = gen_cascade_noise(4096, 0.7, 12).samples
    full = mfdfa(x)
    n_scales = full.surface.scale_grid.size
    trimmed = mfdfa(x, MfdfaConfig(fit_range=(2, n_scales)))
    assert not np.allclose(full.hurst.h, trimmed.hurst.h)
    # the surface itself is unaffected; only the regression window moves
    assert np.array_equal(full.surface.values, trimmed.surface.values)


def test_tau_is_linear_for_constant_h():
    q = np.linspace(-5, 5, 41)
    curve = HurstCurve(q, np.full(41, 0.62), np.zeros(41), np.ones(41))
    tau = tau_from_h(curve)
    assert np.allclose(tau, 0.62 * q - 1.0, atol=1e-15)
    assert tau[20] == -1.0  # q = 0 exactly


def test_monofractal_spectrum_collapses_to_point():
    q = np.linspace(-5, 5, 41)
    curve = HurstCurve(q, np.full(41, 0.62), np.zeros(41), np.ones(41))
    spec = legendre_spectrum(curve)
    assert np.allclose(spec.alpha, 0.62, atol=1e-15)
    assert np.allclose(spec.f_alpha, 1.0, atol=1e-15)


def test_spectrum_needs_three_qs_spanning_zero():
    with pytest.raises(InsufficientSpectrumError):
        legendre_spectrum(HurstCurve(np.array([2.0]), np.array([0.5]), np.zeros(1), np.ones(1)))
    q = np.array([1.0, 2.0, 3.0])
    with pytest.raises(ConfigError):
        legendre_spectrum(HurstCurve(q, np.full(3, 0.5), np.zeros(3), np.ones(3)))


# --- width -----------------------------------------------------------------------

def _parabola_spectrum(alpha0=0.8, n=11):
    alpha = alpha0 + np.linspace(-1.0, 1.0, n)
    f = 1.0 - (alpha - alpha0) ** 2
    q = np.linspace(-5, 5, n)
    return SingularitySpectrum(q, np.zeros(n), alpha, f, True)


def test_width_exact_parabola():
    res = spectrum_width(_parabola_spectrum())
    a, b, c = res.quad_coefficients
    assert a == pytest.approx(-1.0, abs=1e-12)
    assert b == pytest.approx(0.0, abs=1e-12)
    assert c == 1.0
    assert res.width == pytest.approx(2.0, abs=1e-12)
    assert res.asymmetry == pytest.approx(0.0, abs=1e-12)
    assert res.alpha0 == pytest.approx(0.8, abs=1e-12)


def test_width_endpoints_method():
    res = spectrum_width(_parabola_spectrum(), "endpoints")
    assert res.width == pytest.approx(2.0, abs=1e-12)
    assert res.method == "endpoints"
    assert res.quad_coefficients is None
    assert math.isnan(res.asymmetry)


def test_width_requires_three_distinct_alphas():
    n = 5
    spec = SingularitySpectrum(
        np.linspace(-2, 2, n), np.zeros(n), np.full(n, 0.5), np.ones(n), True
    )
    with pytest.raises(InsufficientSpectrumError):
        spectrum_width(spec)


def test_width_rejects_convex_spectrum():
    n = 11
    alpha = np.linspace(-1, 1, n)
    f = 0.6 + alpha**2  # upward parabola
    spec = SingularitySpectrum(np.linspace(-5, 5, n), np.zeros(n), alpha, f, True)
    with pytest.raises(NonConcaveSpectrumError):
        spectrum_width(spec)


# --- whole-analysis properties -------------------------------------------------

def test_mfdfa_is_deterministic():
    x = gen_cascade_noise(4096, 0.7, 5).samples
    r1 = mfdfa(x)
    r2 = mfdfa(x)
    assert np.array_equal(r1.hurst.h, r2.hurst.h)
    assert np.array_equal(r1.surface.values, r2.surface.values)
    assert r1.width.width == r2.width.width


def test_mfdfa_affine_invariance():
    for seed in (0, 1):
        x = gen_cascade_noise(4096, 0.72, seed).samples
        r1 = mfdfa(x)
        r2 = mfdfa(1000.0 * x + 7.0)
        assert np.allclose(r1.hurst.h, r2.hurst.h, rtol=1e-9, atol=1e-12)
        assert np.allclose(r1.spectrum.alpha, r2.spectrum.alpha, rtol=1e-9, atol=1e-12)
        assert np.allclose(r1.spectrum.f_alpha, r2.spectrum.f_alpha, rtol=1e-9, atol=1e-12)
        assert r1.width.width == pytest.approx(r2.width.width, rel=1e-9)


def test_mfdfa_error_names_failing_stage():
    with pytest.raises(DegenerateSegmentError) as err:
        mfdfa(Signal(np.zeros(1024), 100.0))
    assert "stage fluctuation" in str(err.value)


def test_surface_monotone_in_q_on_noise():
    x = np.random.default_rng(20).standard_normal(2048)
    surface = fluctuation_function(compute_profile(x))
    assert np.all(np.diff(surface.values, axis=0) >= -1e-12 * surface.values[:-1])


# --- oracle-signal invariants ------------------------------------------------

@pytest.fixture(scope="module")
def cascade_result():
    from mfaudio import CascadeSpec, gen_binomial_cascade

    return mfdfa(gen_binomial_cascade(CascadeSpec(16, 0.75)))


def test_tau_concave_on_cascade(cascade_result):
    q = cascade_result.spectrum.q_grid
    slopes = np.diff(cascade_result.spectrum.tau) / np.diff(q)
    assert np.all(np.diff(slopes) <= 1e-9)


def test_spectrum_dimension_bounds_on_oracles(cascade_result):
    from mfaudio import FgnSpec, gen_fgn

    for result in (cascade_result, mfdfa(gen_fgn(FgnSpec(0.7, 2**16, 0)))):
        # f(alpha) at q = 0 is exactly 1, so the apex sits within 0.05 of 1
        assert result.spectrum.f_alpha.max() <= 1.05
        assert result.spectrum.f_alpha.max() >= 0.95


def test_cascade_alpha_endpoints_match_closed_form(cascade_result):
    from mfaudio import analytic_cascade_alpha

    alpha = cascade_result.spectrum.alpha
    assert alpha[-1] == pytest.approx(analytic_cascade_alpha(5.0, 0.75), abs=0.05)
    assert alpha[0] == pytest.approx(analytic_cascade_alpha(-5.0, 0.75), abs=0.05)


def test_monofractal_h_range_shrinks_with_length():
    from mfaudio import FgnSpec, gen_fgn

    spans = {}
    for n_exp in (12, 16):
        vals = []
        for seed in range(3):
            curve = mfdfa(gen_fgn(FgnSpec(0.7, 2**n_exp, seed))).hurst
            vals.append(curve.h.max() - curve.h.min())
        spans[n_exp] = np.mean(vals)
    assert spans[16] < spans[12]


def test_white_noise_has_small_width():
    from mfaudio import gen_white_noise

    result = mfdfa(gen_white_noise(2**16, 0))
    assert result.hurst.at(2.0)[0] == pytest.approx(0.5, abs=0.05)
    assert result.width.width < 0.5


def test_music_like_window_width_band():
    # 6 s windows at 22050 Hz of amplitude-modulated noise land in the
    # empirical width range of real sung recordings
    for seed in range(3):
        result = mfdfa(gen_cascade_noise(132_300, 0.7, seed, 22050.0))
        assert 0.2 <= result.width.width <= 0.9


# --- config validation -----------------------------------------------------------

def test_config_rejects_bad_grids():
    with pytest.raises(ConfigError):
        MfdfaConfig(q_grid=[2.0, 1.0])  # not increasing
    with pytest.raises(ConfigError):
        MfdfaConfig(q_grid=[-1.0, 0.0, 1.0])  # missing q = 2
    with pytest.raises(ConfigError):
        MfdfaConfig(scale_grid=[4, 8], detrend_order=3)  # s < m + 2
    with pytest.raises(ConfigError):
        MfdfaConfig(detrend_order=0)
    with pytest.raises(ConfigError):
        MfdfaConfig(width_method="cubic")


def test_config_enforces_scale_bounds_per_signal():
    config = MfdfaConfig(scale_grid=[16, 32, 64, 128])
    with pytest.raises(ConfigError):
        config.scales_for(256)  # 128 > 256 // 4


def test_default_scale_grid_spans_16_to_quarter_n():
    grid = default_scale_grid(2**16)
    assert grid[0] == 16
    assert grid[-1] == 2**14
    assert np.all(np.diff(grid) > 0)
    with pytest.raises(ConfigError):
        default_scale_grid(60)


def test_minimum_signal_length_enforced():
    with pytest.raises(ConfigError):
        mfdfa(np.random.default_rng(0).standard_normal(63))
