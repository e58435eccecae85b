"""Measure layer: constructors, convolution, rates, kernels, validation.

Closed-form values below were derived by hand (normal*normal density,
triangle density, geometric sums) and are asserted against quadrature
or table lookups. Statistical checks use a very conservative level so
they essentially never fail by chance.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from kirchhoff_lines.errors import (
    ImpossibleEventError,
    ParameterError,
    UnsupportedModelError,
)
from kirchhoff_lines.measures import (
    SystemParams,
    atomic_measure,
    bernoulli,
    convolution,
    crossing_kernel_pmf,
    crossing_kernel_sample,
    crossing_kernel_table,
    dirac,
    exponential_measure,
    gamma_measure,
    gaussian,
    geometric,
    poisson_measure,
    split_rate_horizontal,
    split_rate_vertical,
    tilted,
    turn_rate_horizontal,
    turn_rate_vertical,
    uniform_measure,
    validate,
)

ALPHA = 0.001  # very conservative: probabilistic tests fail ~0.1% of the time


def const(value):
    return lambda s: value


def make_params(nu_v, nu_h, pv=0.0, ph=0.0, q=0.0, p_0=0.0, **kw):
    return SystemParams(
        nu_v=nu_v,
        nu_h=nu_h,
        p_v=const(pv),
        p_h=const(ph),
        q=const(q),
        p_0=p_0,
        description="test",
        **kw,
    )


# ---------------------------------------------------------------------------
# constructors


def test_gaussian_mass_and_mean():
    nu = gaussian(mass=3.0, mean=1.0, sd=2.0)
    from scipy.integrate import quad

    total, _ = quad(lambda s: float(nu.density(s)), nu.lo, nu.hi)
    assert abs(total - 3.0) < 1e-9
    assert abs(nu.mean() - 1.0) < 1e-9


def test_gamma_density_integrates_to_mass():
    nu = gamma_measure(shape=2.5, scale=0.7, mass=2.0)
    from scipy.integrate import quad

    total, _ = quad(lambda s: float(nu.density(s)), 0.0, nu.hi, limit=200)
    assert abs(total - 2.0) < 1e-8


def test_exponential_mean_and_negate():
    nu = exponential_measure(rate=2.0)
    assert abs(nu.mean() - 0.5) < 1e-9
    neg = nu.negate()
    assert abs(neg.density_at(-1.0) - nu.density_at(1.0)) < 1e-12
    assert abs(neg.mean() + 0.5) < 1e-9
    rng = np.random.default_rng(7)
    assert all(neg.sample(rng, 100) <= 0.0)


def test_bernoulli_puts_mass_p_at_one():
    nu = bernoulli(0.3, mass=2.0)
    assert abs(nu.mass_at(1.0) - 0.6) < 1e-15
    assert abs(nu.mass_at(0.0) - 1.4) < 1e-15
    assert nu.mass_at(2.0) == 0.0


def test_geometric_truncation_keeps_mean():
    nu = geometric(0.5)
    assert abs(nu.total_mass - 1.0) < 1e-12
    assert abs(nu.mean() - 1.0) < 1e-12  # (1-p)/p = 1


def test_poisson_measure_mass_and_mean():
    nu = poisson_measure(2.5, mass=4.0)
    assert abs(nu.total_mass - 4.0) < 1e-12
    assert abs(nu.mean() - 2.5) < 1e-12


def test_dirac_and_negation():
    nu = dirac(-1, mass=5.0)
    assert nu.weight(-1.0) == 5.0
    assert nu.weight(0.0) == 0.0
    assert nu.negate().weight(1.0) == 5.0


def test_fractional_lattice_lookup():
    nu = atomic_measure(Fraction(1, 3), {1: 1.0, 2: 2.0})
    assert abs(nu.weight(1.0 / 3.0) - 1.0) < 1e-15
    assert nu.weight(0.5) == 0.0
    assert nu.index_of(2.0 / 3.0) == 2


def test_atomic_sampler_matches_pmf():
    nu = atomic_measure(1, {0: 1.0, 1: 3.0})
    rng = np.random.default_rng(11)
    draws = nu.sample(rng, 20_000)
    # mean 0.75, sd sqrt(3)/4 per draw
    se = math.sqrt(3.0) / 4.0 / math.sqrt(20_000)
    assert abs(draws.mean() - 0.75) < 6.0 * se


# ---------------------------------------------------------------------------
# convolution


def test_gaussian_convolution_matches_closed_form():
    # N(0,1) * N(0,1) = N(0,2); density at 0 is 1/(2 sqrt(pi))
    conv = convolution(gaussian(), gaussian())
    assert abs(conv(0.0) - 0.28209479177387814) < 1e-9
    assert abs(conv(1.0) - math.exp(-0.25) / (2.0 * math.sqrt(math.pi))) < 1e-9


def test_uniform_convolution_is_triangle():
    conv = convolution(uniform_measure(0, 1), uniform_measure(0, 1))
    assert abs(conv(0.5) - 0.5) < 1e-9
    assert abs(conv(1.0) - 1.0) < 1e-9
    assert conv(2.5) == 0.0


def test_geometric_convolution_finite_sum():
    # two Geom(1/2) laws: P(sum = 3) = 4 * (1/2)^5 = 1/8
    conv = convolution(geometric(0.5), geometric(0.5))
    assert abs(conv(3.0) - 0.125) < 1e-12
    assert conv(-1.0) == 0.0


def test_convolution_masses_scale():
    conv = convolution(gaussian(mass=2.0), gaussian(mass=3.0))
    assert abs(conv.total_mass - 6.0) < 1e-12
    assert abs(conv(0.0) - 6.0 * 0.28209479177387814) < 1e-8


def test_mixed_kinds_rejected():
    with pytest.raises(UnsupportedModelError):
        convolution(gaussian(), geometric(0.5))


# ---------------------------------------------------------------------------
# rates


def test_gaussian_split_rate_closed_form():
    # p_v * G(0) / g_v(0) = 0.4 * sqrt(2)/2 at s = 0
    params = make_params(gaussian(), gaussian(), pv=0.4)
    assert abs(split_rate_vertical(params, 0.0) - 0.28284271247461906) < 1e-9


def test_exponential_split_rate_is_linear():
    # Exp(1) twice: G(s)/g(s) = s on the positive half line
    params = make_params(exponential_measure(1.0), exponential_measure(1.0), pv=1.0, ph=0.5)
    assert abs(split_rate_vertical(params, 2.0) - 2.0) < 1e-9
    assert abs(split_rate_horizontal(params, 2.0) - 1.0) < 1e-9


def test_split_rate_outside_support_is_zero():
    params = make_params(uniform_measure(0, 1), uniform_measure(0, 1), pv=1.0)
    assert split_rate_vertical(params, 1.5) == 0.0  # G > 0 but g_v = 0
    assert split_rate_vertical(params, 2.5) == 0.0  # both vanish


def test_ratio_fast_path_matches_quadrature():
    slow = make_params(exponential_measure(1.0), exponential_measure(1.0), pv=0.3)
    fast = make_params(
        exponential_measure(1.0),
        exponential_measure(1.0),
        pv=0.3,
        ratio_v=lambda s: s if s > 0 else 0.0,
    )
    for s in (0.5, 1.0, 3.7):
        assert abs(split_rate_vertical(slow, s) - split_rate_vertical(fast, s)) < 1e-8


def test_turn_rates_use_density_ratio():
    params = make_params(gaussian(mass=4.0), gaussian(mass=1.0), q=1.0)
    # sqrt(g_h / g_v) = sqrt(1/4) = 1/2 at every s
    assert abs(turn_rate_vertical(params, 0.7) - 0.5) < 1e-12
    assert abs(turn_rate_horizontal(params, 0.7) - 2.0) < 1e-12
    zero_q = make_params(gaussian(), gaussian(), q=0.0)
    assert turn_rate_vertical(zero_q, 0.0) == 0.0


# ---------------------------------------------------------------------------
# crossing kernels


def test_atomic_kernel_uniform_for_geometric_pair():
    params = make_params(geometric(0.5), geometric(0.5))
    vals, probs = crossing_kernel_pmf(params, 3.0)
    assert list(vals) == [0.0, 1.0, 2.0, 3.0]
    assert np.allclose(probs, 0.25)
    assert abs(probs.sum() - 1.0) < 1e-15


def test_atomic_kernel_impossible_total():
    params = make_params(geometric(0.5), geometric(0.5))
    with pytest.raises(ImpossibleEventError):
        crossing_kernel_pmf(params, -2.0)


def test_gaussian_kernel_table_median():
    # horizontal part given total s is N(s/2, 1/2)
    params = make_params(gaussian(), gaussian())
    ts, cdf = crossing_kernel_table(params, 1.0)
    median = float(np.interp(0.5, cdf, ts))
    assert abs(median - 0.5) < 1e-4


def test_gaussian_kernel_sampling_distribution():
    params = make_params(gaussian(), gaussian())
    rng = np.random.default_rng(23)
    draws = np.array([crossing_kernel_sample(params, 1.0, rng) for _ in range(2000)])
    p = stats.kstest(draws, stats.norm(loc=0.5, scale=math.sqrt(0.5)).cdf).pvalue
    assert p > ALPHA, f"KS p={p:.5f} below {ALPHA} for the conditional law"


def test_fast_kernel_path_is_used():
    params = make_params(gaussian(), gaussian(), kernel=lambda s, rng: 0.25 * s)
    rng = np.random.default_rng(0)
    assert crossing_kernel_sample(params, 2.0, rng) == 0.5


# ---------------------------------------------------------------------------
# validation and tilt invariance


def test_validate_rejects_split_overflow():
    params = make_params(gaussian(), gaussian(), pv=0.7, ph=0.5)
    with pytest.raises(ParameterError):
        validate(params)


def test_validate_rejects_contact_annihilation_for_continuous():
    params = make_params(gaussian(), gaussian(), p_0=0.5)
    with pytest.raises(ParameterError):
        validate(params)


def test_validate_rejects_mixed_kinds():
    params = make_params(gaussian(), geometric(0.5))
    with pytest.raises(UnsupportedModelError):
        validate(params)


def test_validate_accepts_annihilating_atomic_model():
    params = make_params(dirac(-1), dirac(1), p_0=1.0)
    validate(params)


def test_tilt_leaves_rates_invariant():
    base = make_params(gaussian(), gaussian(), pv=0.4, ph=0.4, q=0.1)
    r = 1.3
    tilt = make_params(tilted(gaussian(), r), tilted(gaussian(), r), pv=0.4, ph=0.4, q=0.1)
    for s in (-1.0, 0.0, 0.8, 2.2):
        assert abs(split_rate_vertical(base, s) - split_rate_vertical(tilt, s)) < 1e-6
        assert abs(turn_rate_vertical(base, s) - turn_rate_vertical(tilt, s)) < 1e-6
    ts0, cdf0 = crossing_kernel_table(base, 1.0)
    ts1, cdf1 = crossing_kernel_table(tilt, 1.0)
    assert np.allclose(np.interp(ts0, ts1, cdf1), cdf0, atol=1e-6)


def test_tilt_atomic_reweights_atoms():
    nu = geometric(0.5)
    t = tilted(nu, 2.0)
    assert abs(t.mass_at(3.0) - nu.mass_at(3.0) * 8.0) < 1e-12
