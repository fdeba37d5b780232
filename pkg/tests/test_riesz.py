"""Ladder operators and Hermite-Riesz transforms."""
import math

import numpy as np
import pytest

from hermite_frac.exceptions import DomainError, PreconditionError
from hermite_frac.fractional import MultiplierSpec, multiplier_apply, project_Sk
from hermite_frac.functions import HermiteFn, gaussian
from hermite_frac.hermite import (MultiIndex, SpectralCoeffs, expand,
                                  synthesize, synthesize_many)
from hermite_frac.riesz import (a_deriv_eval, deriv_kernel_batch, ladder_apply,
                                ladder_boundary_eval, ladder_kernel_batch,
                                riesz_kernel_eval, riesz_pointwise,
                                riesz_spectral)


def coeffs(d: dict, n=1, N=10) -> SpectralCoeffs:
    return SpectralCoeffs(n, N, {MultiIndex(k if isinstance(k, tuple) else (k,)): v
                                 for k, v in d.items()})


def rand_coeffs(rng, n=1, N=8) -> SpectralCoeffs:
    from hermite_frac.hermite import multi_indices
    return SpectralCoeffs(n, N, {nu: float(rng.normal())
                                 for nu in multi_indices(n, N)})


def test_annihilation_example():
    out = ladder_apply(1, coeffs({2: 1.0}))
    assert out.get((1,)) == pytest.approx(2.0, abs=1e-15)  # sqrt(2*2)


def test_annihilation_of_ground_state():
    out = ladder_apply(1, coeffs({0: 1.0}))
    assert all(abs(v) == 0.0 for _, v in out.items())


def test_creation_raises_degree():
    c = coeffs({3: 1.0}, N=3)
    out = ladder_apply(-1, c)
    assert out.max_degree == 4
    assert out.get((4,)) == pytest.approx(math.sqrt(8.0), rel=1e-15)


def test_factorization_identity():
    # (1/2) sum_i (A_i A_{-i} + A_{-i} A_i) = H exactly on coefficients
    rng = np.random.default_rng(0)
    for n in (1, 2):
        c = rand_coeffs(rng, n=n, N=5)
        total = None
        for i in range(1, n + 1):
            one = ladder_apply(i, ladder_apply(-i, c))
            two = ladder_apply(-i, ladder_apply(i, c))
            part = {nu: 0.5 * (one.get(nu) + two.get(nu))
                    for nu in set(one.coeffs) | set(two.coeffs)}
            if total is None:
                total = part
            else:
                total = {nu: total.get(nu, 0.0) + part.get(nu, 0.0)
                         for nu in set(total) | set(part)}
        for nu, v in c.items():
            assert total.get(nu, 0.0) == pytest.approx((2 * nu.order + n) * v, rel=1e-12)


def test_ladder_adjointness():
    rng = np.random.default_rng(1)
    c = rand_coeffs(rng, N=6)
    d = rand_coeffs(rng, N=7)
    for i in (1, -1):
        lhs = ladder_apply(i, c).inner(d)
        rhs = c.inner(ladder_apply(-i, d))
        assert lhs == pytest.approx(rhs, rel=1e-13)


@pytest.mark.parametrize("b", [0.5, -0.5, 1.0, -1.0])
def test_commutation_identities(b):
    # A_i H^b = (H+2)^b A_i ; H^b A_i = A_i (H-2)^b ;
    # A_{-i} H^b = (H-2)^b A_{-i} ; H^b A_{-i} = A_{-i} (H+2)^b
    rng = np.random.default_rng(2)
    c = rand_coeffs(rng, N=6)
    c1 = project_Sk(c, 1)  # identities through (H-2)^b need S_1 data
    Hb = MultiplierSpec(b)
    Hp2 = MultiplierSpec(b, shift=2)
    Hm2 = MultiplierSpec(b, shift=-2)

    def close(a, bb):
        for nu in set(a.coeffs) | set(bb.coeffs):
            assert a.get(nu) == pytest.approx(bb.get(nu), abs=1e-12)

    close(ladder_apply(1, multiplier_apply(Hb, c)),
          multiplier_apply(Hp2, ladder_apply(1, c)))
    close(multiplier_apply(Hb, ladder_apply(1, c1)),
          ladder_apply(1, multiplier_apply(Hm2, c1)))
    close(ladder_apply(-1, multiplier_apply(Hb, c1)),
          multiplier_apply(Hm2, ladder_apply(-1, c1)))
    close(multiplier_apply(Hb, ladder_apply(-1, c)),
          ladder_apply(-1, multiplier_apply(Hp2, c)))


def test_a_deriv_annihilates_ground_state():
    u = HermiteFn(0)
    for x in (-1.0, 0.0, 2.3):
        assert a_deriv_eval(1, u, x) == pytest.approx(0.0, abs=1e-12)


def test_a_deriv_creation_is_h1():
    u = HermiteFn(0)
    for x in (-0.7, 0.4):
        want = math.sqrt(2.0) * HermiteFn(1)(x)
        assert a_deriv_eval(-1, u, x) == pytest.approx(want, abs=1e-8)


def test_a_deriv_fd_matches_analytic():
    u = gaussian(0.3, 1.2)
    plain = lambda z: u(z)  # value-only view forces the FD path
    for x in (-1.1, 0.6):
        got = a_deriv_eval(1, plain, x, fd_step=1e-5)
        want = a_deriv_eval(1, u, x)
        assert got == pytest.approx(want, abs=1e-8)


def test_a_deriv_requires_gradient_when_fd_disabled():
    with pytest.raises(PreconditionError):
        a_deriv_eval(1, lambda z: np.exp(-np.asarray(z) ** 2), 0.0, allow_fd=False)


def test_riesz_spectral_h1():
    out = riesz_spectral("R_i", (1,), coeffs({1: 1.0}))
    assert out.get((0,)) == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-14)


def test_riesz_spectral_ground_state():
    out = riesz_spectral("R_i", (1,), coeffs({0: 1.0}))
    assert all(v == 0.0 for _, v in out.items())


def test_commutation_route_equality():
    # A_i H^{-1/2} c = (H+2)^{-1/2} A_i c exactly
    rng = np.random.default_rng(3)
    c = rand_coeffs(rng, N=7)
    a = ladder_apply(1, multiplier_apply(MultiplierSpec(-0.5), c))
    b = multiplier_apply(MultiplierSpec(-0.5, shift=2), ladder_apply(1, c))
    for nu in set(a.coeffs) | set(b.coeffs):
        assert a.get(nu) == pytest.approx(b.get(nu), abs=1e-14)


def test_adjoint_composition_is_sqrt_h():
    # (1/2) sum_i (R_i^* A_{-i} + R_{-i}^* A_i) = H^{1/2} on coefficients
    rng = np.random.default_rng(4)
    c = rand_coeffs(rng, N=6)
    one = riesz_spectral("R_i_star", (1,), ladder_apply(-1, c))
    two = riesz_spectral("R_i_star", (-1,), ladder_apply(1, c))
    for nu, v in c.items():
        got = 0.5 * (one.get(nu) + two.get(nu))
        assert got == pytest.approx(math.sqrt(2 * nu.order + 1) * v, rel=1e-12)


def test_riesz_kernel_shell_cancelation_bounded():
    # the antisymmetric part keeps shell integrals bounded uniformly in (r1, r2)
    from hermite_frac.lab import cancellation_integral
    rng = np.random.default_rng(5)
    vals = []
    for _ in range(25):
        x = rng.uniform(-2, 2)
        r1 = 10 ** rng.uniform(-3, -0.5)
        r2 = r1 * 10 ** rng.uniform(0.1, 1.5)
        vals.append(abs(cancellation_integral("AiF_neg_half", x, r1, r2)))
    assert np.isfinite(vals).all()
    assert max(vals) < 10.0


def test_shell_integral_empty_domain():
    from hermite_frac.lab import cancellation_integral
    assert cancellation_integral("AiF_neg_half", 0.5, 0.3, 0.3) == 0.0


def test_second_order_kernel_size_bound():
    rng = np.random.default_rng(6)
    C = 16.0
    for _ in range(200):
        x = rng.uniform(-2.5, 2.5)
        r = 10 ** rng.uniform(-2.5, 0.4)
        z = x + rng.choice([-1, 1]) * r
        val = riesz_kernel_eval("R_ij", (1, 1), x, z)
        comp = r ** -1.0 * math.exp(-abs(x) * r / C - r * r / C)
        assert abs(val) <= 40.0 * comp


def test_riesz_kernel_diagonal_rejected():
    with pytest.raises(DomainError):
        riesz_kernel_eval("AiF_neg_half", (1,), 0.2, 0.2)
    with pytest.raises(DomainError):
        riesz_kernel_eval("nope", (1,), 0.0, 1.0)


def test_rij_kernel_decomposition():
    # R_ij = d2 F_{-1} + x_j d_i F_{-1} + x_i d_j F_{-1} + x_i x_j F_{-1}
    #        + delta_ij F_{-1}, pointwise off the diagonal
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = rng.uniform(-2, 2, size=1)
        z = x + rng.choice([-1, 1]) * 10 ** rng.uniform(-2, 0.3, size=1)
        Z = z.reshape(1, 1)
        whole = ladder_kernel_batch((1, 1), x, Z, 1.0)[0]
        parts = (deriv_kernel_batch("dxx", x, Z, 1.0)[0]
                 + 2.0 * x[0] * deriv_kernel_batch("grad_i", x, Z, 1.0)[0]
                 + x[0] * x[0] * deriv_kernel_batch("plain", x, Z, 1.0)[0]
                 + deriv_kernel_batch("plain", x, Z, 1.0)[0])
        assert whole == pytest.approx(parts, abs=1e-8)


def test_riesz_pointwise_h1():
    u = HermiteFn(1)
    want_fn = HermiteFn(0)
    for x in (0.0, 1.0, -1.0):
        got = riesz_pointwise("R_i", (1,), u, x)
        assert got == pytest.approx(math.sqrt(2.0 / 3.0) * float(want_fn(x)), abs=1e-5)


def test_riesz_pointwise_ground_state_annihilated():
    u = HermiteFn(0)
    for x in (0.0, 0.8):
        assert riesz_pointwise("R_i", (1,), u, x) == pytest.approx(0.0, abs=1e-6)


def test_riesz_pointwise_second_order_vs_spectral():
    u = gaussian(0.3, 1.1)
    c = expand(u, 1, 64)
    spec = riesz_spectral("R_ij", (1, 1), c)
    for x in (0.0, -1.2):
        got = riesz_pointwise("R_ij", (1, 1), u, x)
        assert got == pytest.approx(synthesize(spec, x), abs=1e-5)


def test_adjoint_route_agreement():
    # R_{-i}^* = A_{-i}(H+2)^{-1/2}: kernel route vs spectral composition
    u = gaussian(-0.2, 0.9)
    c = expand(u, 1, 64)
    spec = riesz_spectral("R_i_star", (-1,), c)
    for x in (0.0, 0.9):
        got = riesz_pointwise("R_i_star", (-1,), u, x)
        assert got == pytest.approx(synthesize(spec, x), abs=1e-5)
    # positive index goes through the fractional integral of A_i u
    spec_pos = riesz_spectral("R_i_star", (1,), c)
    got = riesz_pointwise("R_i_star", (1,), u, 0.4)
    assert got == pytest.approx(synthesize(spec_pos, 0.4), abs=1e-5)


def test_ladder_boundary_values_consistent():
    # A_i H^{-1/2}1 at 0 vanishes by symmetry (odd in x)
    assert ladder_boundary_eval((1,), np.zeros(1), 0.5) == pytest.approx(0.0, abs=1e-12)
    v_plus = ladder_boundary_eval((1,), np.array([1.3]), 0.5)
    v_minus = ladder_boundary_eval((1,), np.array([-1.3]), 0.5)
    assert v_plus == pytest.approx(-v_minus, rel=1e-10)


def test_ladder_index_validation():
    with pytest.raises(DomainError):
        ladder_apply(0, coeffs({0: 1.0}))
    with pytest.raises(DomainError):
        ladder_apply(2, coeffs({0: 1.0}))
