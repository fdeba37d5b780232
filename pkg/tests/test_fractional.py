"""Fractional powers and integrals: multipliers, kernels, pointwise routes."""
import math

import numpy as np
import pytest
from scipy import integrate

from hermite_frac.exceptions import (DomainError, PreconditionError,
                                     PrincipalValueError)
from hermite_frac.fractional import (KernelSpec, MultiplierSpec,
                                     boundary_term_eval, frac_pointwise,
                                     fracint_pointwise, gamma_neg, kernel_eval,
                                     kernel_eval_batch, multiplier_apply,
                                     project_Sk)
from hermite_frac.functions import Constant, HermiteFn, gaussian
from hermite_frac.hermite import MultiIndex, SpectralCoeffs, hermite_eval_1d
from hermite_frac.quadrature import QuadratureSpec, shell_mesh

H_NEG1_ONE_AT_0 = 1.3110287771460598  # adaptive quadrature of (cosh 2t)^{-1/2}


def coeffs(d: dict, n=1, N=8) -> SpectralCoeffs:
    return SpectralCoeffs(n, N, {MultiIndex(k if isinstance(k, tuple) else (k,)): v
                                 for k, v in d.items()})


def test_gamma_reflection():
    assert gamma_neg(0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-14)


def test_multiplier_basic():
    c = coeffs({4: 1.0})
    out = multiplier_apply(MultiplierSpec(0.5), c)
    assert out.get((4,)) == pytest.approx(3.0, rel=1e-15)  # (2*4+1)^{1/2}


def test_multiplier_sigma_zero_identity():
    c = coeffs({0: 0.3, 3: -1.2, 7: 0.01})
    out = multiplier_apply(MultiplierSpec(0.0), c)
    for nu, v in c.items():
        assert out.get(nu) == v


def test_multiplier_inverse_law():
    c = coeffs({0: 1.0, 2: -0.4, 5: 2.2})
    sigma = 0.63
    back = multiplier_apply(MultiplierSpec(-sigma),
                            multiplier_apply(MultiplierSpec(sigma), c))
    for nu, v in c.items():
        assert back.get(nu) == pytest.approx(v, abs=1e-12)


def test_multiplier_sk_precondition_names_offender():
    c = coeffs({0: 0.5, 3: 1.0})
    with pytest.raises(PreconditionError, match=r"\(0,\)"):
        multiplier_apply(MultiplierSpec(0.5, shift=-2), c)
    # projected data passes
    out = multiplier_apply(MultiplierSpec(0.5, shift=-2), project_Sk(c, 1))
    assert out.get((3,)) == pytest.approx((2 * 3 + 1 - 2) ** 0.5, rel=1e-14)


def test_project_sk():
    c = coeffs({0: 1.0, 3: 2.0})
    assert project_Sk(c, 0).get((0,)) == 1.0
    p = project_Sk(c, 1)
    assert p.get((0,)) == 0.0
    assert p.get((3,)) == 2.0
    pp = project_Sk(p, 1)
    assert {nu.components: v for nu, v in pp.items()} == \
        {nu.components: v for nu, v in p.items()}


def test_kernel_symmetry():
    ks = KernelSpec("F_sigma", 0.45)
    a = kernel_eval(ks, 0.8, -0.3)
    b = kernel_eval(ks, -0.3, 0.8)
    assert a == pytest.approx(b, rel=1e-12)


def test_kernel_positivity_ordering():
    # 0 <= F_{2k,sigma} <= F_sigma pointwise
    rng = np.random.default_rng(4)
    sigma = 0.55
    ks0 = KernelSpec("F_sigma", sigma)
    ks1 = KernelSpec("F_2k_sigma", sigma, k=1)
    for _ in range(100):
        x = rng.uniform(-3, 3)
        z = x + rng.choice([-1, 1]) * 10 ** rng.uniform(-2, 0.5)
        f0 = kernel_eval(ks0, x, z)
        f1 = kernel_eval(ks1, x, z)
        assert 0.0 <= f1 <= f0


def test_kernel_against_t_domain_adaptive():
    # independent oracle: adaptive quadrature of the subordination integral
    sigma, x, z = 0.3, 0.5, -0.5
    got = kernel_eval(KernelSpec("F_sigma", sigma), x, z)

    def G_t(t):
        return (2 * math.pi * math.sinh(2 * t)) ** -0.5 * math.exp(
            -(0.5 * (x - z) ** 2 / math.tanh(2 * t) + x * z * math.tanh(t)))

    hi, _ = integrate.quad(lambda t: G_t(t) * t ** (-1 - sigma), 1.0, 350.0,
                           epsabs=1e-15, epsrel=1e-12, limit=400)
    lo, _ = integrate.quad(lambda v: G_t(1.0 / v) * v ** (sigma - 1), 1.0, 2000.0,
                           epsabs=1e-15, epsrel=1e-12, limit=400)
    want = (hi + lo) / (-gamma_neg(sigma))
    assert got == pytest.approx(want, rel=1e-7)


def test_kernel_diagonal_rejected():
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec("F_sigma", 0.5), 0.3, 0.3)


def test_kernel_spec_validation():
    with pytest.raises(DomainError):
        KernelSpec("F_2k_sigma", 0.4, k=0)
    with pytest.raises(DomainError):
        KernelSpec("F_sigma", 1.0)
    with pytest.raises(DomainError):
        KernelSpec("nope", 0.5)
    KernelSpec("F_neg_sigma", 1.0)  # sigma = 1 allowed for the integral kernel


def test_boundary_growth():
    # |B_sigma(x)| <= C (1 + |x|^{2 sigma}) with a finite fitted constant
    sigma = 0.7
    xs = np.linspace(0.0, 20.0, 41)
    vals = np.array([boundary_term_eval("B_sigma", sigma, x) for x in xs])
    ratio = np.abs(vals) / (1.0 + xs ** (2 * sigma))
    assert np.isfinite(ratio).all()
    assert ratio.max() < 5.0


def test_h_neg_one_at_zero_both_routes():
    # frozen oracle: integral of (cosh 2t)^{-1/2} dt = 1.3110287771460598
    got = boundary_term_eval("H_neg_sigma_one", 1.0, 0.0)
    assert got == pytest.approx(H_NEG1_ONE_AT_0, abs=1e-8)
    # second route: H^{-sigma}1(x) = integral of F_{-sigma}(x, z) dz; for
    # n = 1 < 2 sigma the kernel is bounded at the diagonal, so the omitted
    # inner ball contributes 2 r_in F(0, ~0)
    r_in = 1e-5
    mesh = shell_mesh(1, r_in, 14.0)
    Z = mesh.offsets  # centered at x = 0
    ks = KernelSpec("F_neg_sigma", 1.0)
    F = kernel_eval_batch(ks, np.zeros(1), Z)
    inner = 2.0 * r_in * kernel_eval(ks, 0.0, r_in / 2)
    assert float(F @ mesh.weights) + inner == pytest.approx(H_NEG1_ONE_AT_0, abs=1e-8)


def test_guarded_constant_reproduces_boundary_term():
    sigma = 0.4
    u = Constant(1.0)
    for x in (0.0, 1.2):
        got = frac_pointwise(u, sigma, x)
        assert got == pytest.approx(boundary_term_eval("B_sigma", sigma, x), abs=1e-10)


def test_frac_pointwise_ground_state():
    u = HermiteFn(0)
    for sigma in (0.2, 0.5, 0.8):
        for x in (-2.0, 0.0, 1.5):
            got = frac_pointwise(u, sigma, x)
            assert got == pytest.approx(float(u(x)), abs=1e-6)


def test_frac_pointwise_h2():
    u = HermiteFn(2)
    sigma = 0.5
    for x in (-1.0, 0.0, 0.7, 2.5):
        got = frac_pointwise(u, sigma, x)
        assert got == pytest.approx(math.sqrt(5.0) * float(u(x)), abs=1e-6)


def test_fracint_pointwise_ground_state():
    u = HermiteFn(0)
    for x in (-1.0, 0.3):
        assert fracint_pointwise(u, 0.5, x) == pytest.approx(float(u(x)), abs=1e-6)


def test_fracint_pointwise_h4_sigma_one():
    u = HermiteFn(4)
    for x in (0.0, 1.1):
        got = fracint_pointwise(u, 1.0, x)
        assert got == pytest.approx(float(u(x)) / 9.0, abs=1e-6)


def test_inverse_composition_spot_check():
    # fracint(frac(u)) = u at a point, with the inner operator applied on a
    # sampled spline surrogate (full battery in the acceptance suite)
    from scipy.interpolate import CubicSpline
    sigma = 0.4
    u = gaussian(0.2, 0.9)
    zs = np.linspace(-8.0, 8.0, 161)
    vals = np.array([frac_pointwise(u, sigma, z) for z in zs])
    spline = CubicSpline(zs, vals)
    v = lambda z: np.where(np.abs(z) <= 8.0, spline(np.clip(z, -8, 8)), 0.0)
    got = fracint_pointwise(v, sigma, 0.5)
    assert got == pytest.approx(float(u(0.5)), abs=1e-5)


def test_fracint_kernel_nonnegative():
    rng = np.random.default_rng(8)
    for sigma in (0.3, 0.5, 1.0):
        ks = KernelSpec("F_neg_sigma", sigma)
        for _ in range(40):
            x = rng.uniform(-3, 3)
            z = x + rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 0.6)
            assert kernel_eval(ks, x, z) >= -1e-14


def test_comparison_principle_spot():
    sigma = 0.6
    x0 = 0.4
    u = gaussian(0.0, 1.0)
    bump = lambda z: 0.2 * (np.asarray(z) - x0) ** 2 * np.exp(-(np.asarray(z) - x0) ** 2)

    class Below:
        name = "v"
        def __call__(self, z):
            return np.asarray(u(z)) - bump(z)

    Hu = frac_pointwise(u, sigma, x0)
    Hv = frac_pointwise(Below(), sigma, x0)
    assert Hu <= Hv + 1e-8


def test_pv_failure_surfaces():
    u = HermiteFn(3)
    with pytest.raises(PrincipalValueError) as info:
        frac_pointwise(u, 0.75, 0.8, pv_tol=1e-16)
    assert info.value.delta == pytest.approx(1e-3)


def test_smoothness_precondition():
    plain = lambda z: np.exp(-np.asarray(z) ** 2)  # no gradient attribute
    with pytest.raises(PreconditionError):
        frac_pointwise(plain, 0.75, 0.0, alpha=0.9, allow_fd=False)
    # finite differences allowed: works
    val = frac_pointwise(plain, 0.75, 0.0, alpha=0.9)
    assert math.isfinite(val)


def test_sigma_domain_errors():
    u = HermiteFn(0)
    with pytest.raises(DomainError):
        frac_pointwise(u, 1.0, 0.0)
    with pytest.raises(DomainError):
        fracint_pointwise(u, 1.2, 0.0)


def test_shell_scaling_quick():
    # the delta-annulus of the defining integral scales like
    # delta^(alpha - 2 sigma + 1) for a kink of Hoelder exponent alpha
    sigma, alpha = 0.5, 0.6
    ks = KernelSpec("F_sigma", sigma)
    u = lambda w: np.abs(w) ** (1 + alpha) * np.exp(-np.asarray(w) ** 2)
    vals = []
    deltas = (8e-3, 4e-3, 2e-3)
    for d in deltas:
        mesh = shell_mesh(1, d / 2, d, ratio=1.3)
        F = kernel_eval_batch(ks, np.zeros(1), mesh.offsets)
        vals.append(abs(float((0.0 - u(mesh.offsets[:, 0])) * F @ mesh.weights)))
    slopes = [math.log2(a / b) for a, b in zip(vals, vals[1:])]
    for s in slopes:
        assert s == pytest.approx(alpha - 2 * sigma + 1, abs=0.1)
