"""Heat semigroup: Meda transform, measure density, kernels, applications."""
import math

import numpy as np
import pytest
from scipy import integrate

from hermite_frac.exceptions import DomainError
from hermite_frac.heat import (heat_apply, heat_kernel, heat_kernel_s,
                               heat_of_one, meda_s_of_t, meda_t_of_s, mehler,
                               mehler_partial, mu_density)
from hermite_frac.hermite import (SpectralCoeffs, expand, hermite_eval_1d,
                                  quadrature_rule, synthesize_many)
from hermite_frac.holder import GridFunction

GAMMA_HALF = 1.7724538509055159  # Gamma(1/2)


def test_meda_forward():
    assert meda_t_of_s(0.5) == pytest.approx(0.5 * math.log(3.0), abs=1e-15)
    assert meda_t_of_s(0.5) == pytest.approx(0.5493061, abs=1e-7)


def test_meda_inverse():
    assert meda_s_of_t(1.0) == pytest.approx(math.tanh(1.0), abs=1e-15)
    assert meda_s_of_t(1.0) == pytest.approx(0.7615942, abs=1e-7)


def test_meda_roundtrip():
    s = 0.999
    assert meda_s_of_t(meda_t_of_s(s)) == pytest.approx(s, abs=1e-14)


def test_meda_domain():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(DomainError):
            meda_t_of_s(bad)
    with pytest.raises(DomainError):
        meda_s_of_t(0.0)


def test_mu_density_at_tanh_one():
    want = math.cosh(1.0) ** 2
    for rho in (-0.5, 0.0, 0.7):
        assert mu_density(math.tanh(1.0), rho) == pytest.approx(want, rel=1e-12)
    assert want == pytest.approx(2.3810978, abs=1e-7)


def test_mu_density_small_s_asymptotics():
    s = 1e-6
    assert mu_density(s, 0.5) * s ** 1.5 == pytest.approx(1.0, rel=1e-3)


def test_mu_density_domain():
    with pytest.raises(DomainError):
        mu_density(1.0, 0.5)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_gamma_half_change_of_variables():
    # integral of e^{-t} dt/t^{1/2} = Gamma(1/2) through the Meda substitution
    got, _ = integrate.quad(lambda s: math.exp(-meda_t_of_s(s)) * mu_density(s, -0.5),
                            1e-14, 1.0 - 1e-14, epsabs=1e-12, epsrel=1e-12, limit=500)
    assert got == pytest.approx(GAMMA_HALF, abs=1e-8)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("rho", [-0.75, -0.5, 0.5])
@pytest.mark.parametrize("f", [
    lambda t: t * np.exp(-t),
    lambda t: t * t * np.exp(-2 * t),
    lambda t: (1.0 - np.exp(-t)) * np.exp(-t),
], ids=["t_exp", "t2_exp2", "one_minus_exp"])
def test_measure_change_of_variables(rho, f):
    # dt/t^{1+rho} = d(mu_rho)(s): both sides adaptively, 3 integrands x 3 rho
    expected, _ = integrate.quad(lambda t: f(t) * t ** (-1 - rho), 0, 200,
                                 epsabs=1e-13, limit=400)
    got, _ = integrate.quad(lambda s: f(meda_t_of_s(s)) * mu_density(s, rho),
                            1e-14, 1.0 - 1e-14, epsabs=1e-12, epsrel=1e-12, limit=500)
    assert got == pytest.approx(expected, abs=1e-8)


def test_heat_kernel_value_and_series():
    got = heat_kernel(0.5, 0.0, 0.0)
    assert got == pytest.approx((2 * math.pi * math.sinh(1.0)) ** -0.5, rel=1e-13)
    # independent oracle: the spectral series at x = z = 0 with 80 terms
    series = sum(math.exp(-0.5 * (2 * j + 1)) * hermite_eval_1d(j, 0.0) ** 2
                 for j in range(80))
    assert got == pytest.approx(series, abs=1e-8)


def test_heat_kernel_symmetry():
    assert heat_kernel(0.3, 1.2, -0.7) == heat_kernel(0.3, -0.7, 1.2)


def test_heat_kernel_eigenrelation():
    # integral of G_t(x, z) h_nu(z) dz = e^{-t(2|nu|+n)} h_nu(x)
    rule = quadrature_rule(160)
    t = 0.35
    for k in (0, 1, 4):
        for x in (0.0, 0.9):
            vals = np.array([heat_kernel(t, x, z) for z in rule.nodes])
            got = rule.integrate(vals * hermite_eval_1d(k, rule.nodes))
            want = math.exp(-t * (2 * k + 1)) * hermite_eval_1d(k, x)
            assert got == pytest.approx(want, abs=1e-8)


def test_heat_kernel_large_t_finite():
    v = heat_kernel(400.0, 0.5, 0.5)
    assert math.isfinite(v)
    assert v >= 0.0


def test_heat_kernel_s_matches_t_form():
    s = math.tanh(1.0)
    got = heat_kernel_s(s, 0.3, -0.2)
    assert got == pytest.approx(heat_kernel(1.0, 0.3, -0.2), rel=1e-12)


def test_heat_kernel_s_vanishes_at_one():
    assert heat_kernel_s(1 - 1e-12, 0.0, 0.0) < 1e-6


def test_heat_kernel_s_dimension_factorization():
    s = 0.42
    x = (0.3, -1.1)
    z = (-0.5, 0.8)
    got = heat_kernel_s(s, x, z)
    want = heat_kernel_s(s, x[0], z[0]) * heat_kernel_s(s, x[1], z[1])
    assert got == pytest.approx(want, rel=1e-12)


def test_mehler_small_r_limit():
    x, z = 0.4, -0.9
    got = mehler(1e-8, x, z)
    want = math.pi ** -0.5 * math.exp(-0.5 * (x * x + z * z))
    assert got == pytest.approx(want, abs=1e-6)


def test_mehler_against_series():
    r, x, z = 0.5, 0.7, -0.1
    series = sum(r ** j * hermite_eval_1d(j, x) * hermite_eval_1d(j, z)
                 for j in range(200))
    assert mehler(r, x, z) == pytest.approx(series, abs=1e-10)


def test_mehler_partial_cut_below_half():
    assert mehler_partial(0.4, 0.3, 0.5, 2) == 0.0


def test_mehler_partial_above_half():
    s = 0.8
    r = (1 - s) / (1 + s)
    want = (r ** 0.5 * hermite_eval_1d(0, 0.3) * hermite_eval_1d(0, 0.5)
            + r ** 1.5 * hermite_eval_1d(1, 0.3) * hermite_eval_1d(1, 0.5))
    assert mehler_partial(s, 0.3, 0.5, 2) == pytest.approx(want, rel=1e-12)


def test_heat_of_one_initial_condition():
    assert heat_of_one(1e-6, 1.3) == pytest.approx(1.0, abs=1e-4)


def test_heat_of_one_against_quadrature():
    # this adjudicates the 2*pi normalization: direct integration of G_t dz
    got = heat_of_one(0.5, 0.0)
    assert got == pytest.approx(math.cosh(1.0) ** -0.5, rel=1e-13)
    f = lambda z: heat_kernel(0.5, 0.0, z)
    want, _ = integrate.quad(f, -12, 12, epsabs=1e-13, limit=300)
    assert got == pytest.approx(want, abs=1e-8)


def test_heat_of_one_monotone_in_x():
    vals = [heat_of_one(0.7, x) for x in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_heat_apply_eigenfunction():
    c = SpectralCoeffs(1, 5, {(3,): 1.0})
    out = heat_apply(0.2, c)
    assert out.get((3,)) == pytest.approx(math.exp(-1.4), rel=1e-14)


def test_heat_apply_semigroup_law():
    c = expand(lambda x: np.exp(-x * x), 1, 24)
    one = heat_apply(0.7, heat_apply(0.3, c))
    two = heat_apply(1.0, c)
    for nu, v in two.items():
        assert one.get(nu) == pytest.approx(v, abs=1e-8)


def test_heat_apply_grid_vs_spectral():
    f = lambda x: np.exp(-x * x)
    t = 0.3
    g = GridFunction.from_callable(f, 1, half_width=8.0, step=0.02)
    out_grid = heat_apply(t, g)
    c = expand(f, 1, 48)
    spectral = synthesize_many(heat_apply(t, c), g.axis.reshape(-1, 1))
    inside = np.abs(g.axis) <= 3.0
    assert np.max(np.abs(out_grid.values[inside] - spectral[inside])) < 1e-7


def test_heat_apply_grid_two_dimensional():
    f = lambda pts: np.exp(-np.sum(pts * pts, axis=1))
    g = GridFunction.from_callable(f, 2, half_width=6.0, step=0.1)
    out = heat_apply(0.4, g)
    c = expand(f, 2, 24)
    pts = g.points()
    spectral = synthesize_many(heat_apply(0.4, c), pts).reshape(out.values.shape)
    inside = np.max(np.abs(pts), axis=1).reshape(out.values.shape) <= 2.5
    assert np.max(np.abs(out.values - spectral)[inside]) < 1e-7


def test_chapman_kolmogorov():
    rng = np.random.default_rng(5)
    ys = np.linspace(-10, 10, 2001)
    for _ in range(3):
        t, s = rng.uniform(0.1, 0.8, size=2)
        x, z = rng.uniform(-1.5, 1.5, size=2)
        Gt = np.array([heat_kernel(t, x, y) for y in ys])
        Gs = np.array([heat_kernel(s, y, z) for y in ys])
        conv = np.trapezoid(Gt * Gs, ys)
        assert conv == pytest.approx(heat_kernel(t + s, x, z), abs=1e-8)


def test_positivity_samples():
    rng = np.random.default_rng(9)
    for _ in range(50):
        t = rng.uniform(0.01, 3.0)
        x, z = rng.uniform(-4, 4, size=2)
        assert heat_kernel(t, x, z) > 0.0


def test_gaussian_envelope_fitted_constant():
    # remark after the exponential estimate: G_{t(s)} <= C ((1-s)/s)^{n/2}
    #   e^{-|x||x-z|/C} e^{-|x-z|^2/(C s)} with one finite C
    rng = np.random.default_rng(2)
    m = 10_000
    s = rng.uniform(1e-3, 1 - 1e-3, size=m)
    x = rng.uniform(-4, 4, size=m)
    z = rng.uniform(-4, 4, size=m)
    q = np.array([heat_kernel_s(si, xi, zi) for si, xi, zi in zip(s[:500], x[:500], z[:500])])
    C = 8.0
    comp = ((1 - s[:500]) / s[:500]) ** 0.5 \
        * np.exp(-np.abs(x[:500]) * np.abs(x[:500] - z[:500]) / C
                 - (x[:500] - z[:500]) ** 2 / (C * s[:500]))
    keep = comp > 1e-280  # both sides underflow together far out in the tails
    ratio = q[keep] / comp[keep]
    assert np.isfinite(ratio).all()
    assert ratio.max() < 10.0


def test_heat_apply_domain_errors():
    with pytest.raises(DomainError):
        heat_apply(0.0, SpectralCoeffs(1, 2, {}))
    with pytest.raises(DomainError):
        heat_apply(0.5, "not a function")
