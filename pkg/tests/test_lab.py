"""Verification lab: bound fits, cancelation sweeps, mollifier, norm ratios."""
import math

import numpy as np
import pytest

from hermite_frac.exceptions import DomainError, PreconditionError
from hermite_frac.fractional import MultiplierSpec, multiplier_apply
from hermite_frac.functions import Bump, gaussian, gaussian_bump_family
from hermite_frac.hermite import SpectralCoeffs, MultiIndex, expand
from hermite_frac.holder import GridFunction, seminorm_holder
from hermite_frac.lab import (BoundForm, MollifierSpec, cancellation_integral,
                              cancellation_sweep, fit_bound_constant,
                              l1_row_bound, lemma_campaign, mollify,
                              pair_sampler, schauder_ratio, schauder_report,
                              schauder_signature, smooth_cutoff,
                              tail_cancellation_sweep, triple_sampler)
from hermite_frac.riesz import ladder_apply, riesz_spectral


def test_psi_bound_is_sharp_and_stable():
    reports = lemma_campaign("5.1", samples=2000, seed=0)
    for rep in reports:
        assert math.isfinite(rep.constant)
        assert rep.constant <= 1.0 + 1e-12  # the proof gives constant exactly 1
        assert rep.stability_pass


def test_measure_moment_three_regimes():
    reports = lemma_campaign("5.2", samples=800, seed=1)
    assert len(reports) == 3
    for rep in reports:
        assert math.isfinite(rep.constant)
        assert rep.stability_pass, rep.name


def test_frac_kernel_size_example():
    reports = lemma_campaign("5.3", samples=1200, seed=2)
    names = " ".join(r.name for r in reports)
    assert "F_sigma s=0.4" in names and "smoothness" in names
    for rep in reports:
        assert math.isfinite(rep.constant)
        assert rep.stability_pass, rep.name


def test_degenerate_single_sample():
    form = BoundForm("one", lambda rng, m: {"x": rng.normal(size=(m, 1)),
                                            "z": rng.normal(size=(m, 1)) + 3.0},
                     lambda d: np.ones(len(d["x"])),
                     lambda d: 2.0 * np.ones(len(d["x"])))
    rep = fit_bound_constant(form, samples=1, seed=0)
    assert rep.constant == pytest.approx(0.5)
    assert rep.stability_ratio is None
    assert rep.stability_pass is None


def test_cancellation_empty_and_domain():
    assert cancellation_integral("AiF_neg_half", 0.3, 0.2, 0.2) == 0.0
    with pytest.raises(DomainError):
        cancellation_integral("AiF_neg_half", 0.3, 0.5, 0.2)


def test_cancellation_sweep_stable():
    rep = cancellation_sweep("AiF_neg_half", triples=120, seed=3)
    assert math.isfinite(rep.constant)
    assert rep.stability_pass


def test_tail_cancellation_f_sigma():
    rep = tail_cancellation_sweep(sigma=0.4, points=40, seed=4)
    assert math.isfinite(rep.constant)
    assert rep.stability_pass


def test_l1_row_zero_at_origin():
    top, rows = l1_row_bound("absx_F_neg", np.array([[0.0]]), sigma=0.5)
    assert top == pytest.approx(0.0, abs=1e-14)


def test_l1_row_sweep_finite_and_flat():
    xs = np.linspace(0.5, 20.0, 12).reshape(-1, 1)
    top, rows = l1_row_bound("absx_F_neg", xs, sigma=0.5)
    assert math.isfinite(top)
    far = rows[-4:]
    assert far.max() / far.min() < 2.0  # flat for large |x|


def test_l1_row_mixed_kind_two_dimensional():
    xs = np.array([[0.5, -0.2], [3.0, 1.0], [8.0, -4.0]])
    top, rows = l1_row_bound("x_dF_neg1", xs)
    assert math.isfinite(top)
    assert (rows >= 0).all()


def test_l1_row_unknown_kind():
    with pytest.raises(DomainError):
        l1_row_bound("nope", np.zeros((1, 1)))


def test_smooth_cutoff_profile():
    assert smooth_cutoff(np.array([0.0, 1.0]))[0] == 1.0
    assert smooth_cutoff(np.array([2.0, 3.0]))[1] == 0.0
    mid = smooth_cutoff(np.array([1.5]))[0]
    assert 0.0 < mid < 1.0


def test_gauss_weierstrass_normalized():
    # integral of W_t = 1 via the same Gauss-Hermite substitution the
    # mollifier uses, against a trapezoid oracle
    t = 1.0 / 16
    ys = np.linspace(-3, 3, 6001)
    W = (4 * math.pi * t) ** -0.5 * np.exp(-ys ** 2 / (4 * t))
    assert np.trapezoid(W, ys) == pytest.approx(1.0, abs=1e-10)


def test_mollify_zero_function():
    assert mollify(lambda z: np.zeros_like(np.asarray(z, dtype=float)),
                   MollifierSpec(8), 0.3) == 0.0


def test_mollify_matches_refined_convolution():
    u = Bump(0.0, 1.0)
    spec = MollifierSpec(64)
    t = 1.0 / 64
    ys = np.linspace(-1.2, 1.2, 24001)
    for x in (-0.8, 0.0, 0.5):
        got = mollify(u, spec, x)
        W = (4 * math.pi * t) ** -0.5 * np.exp(-ys ** 2 / (4 * t))
        want = np.trapezoid(np.asarray(u(x - ys)) * W, ys)  # cutoff = 1 on B_1
        assert got == pytest.approx(want, abs=1e-3)


def test_mollify_converges_on_compacts():
    u = Bump(0.0, 1.0)
    xs = np.linspace(-1.0, 1.0, 21)
    devs = []
    for j in (4, 16, 64):
        devs.append(max(abs(mollify(u, MollifierSpec(j), x) - float(u(x)))
                        for x in xs))
    assert devs[0] > devs[1] > devs[2]
    # rate ~ 1/j, degraded near the support edge where the bump's second
    # derivative is unbounded in j-uniform terms
    assert devs[1] / devs[2] > 1.5
    assert devs[2] < 0.2


def test_mollify_holder_stability():
    # [f_j]_{C^0,alpha} <= C [u]_{C^0,alpha} uniformly in j; mollification
    # contracts the seminorm, so the fitted C sits at ~1 for every scale
    u = gaussian(0.0, 0.8)
    alpha = 0.7
    base = seminorm_holder(GridFunction.from_callable(u, 1, 4.0, 0.05), alpha)
    ratios = []
    for j in (2, 4, 8, 16):
        fj = GridFunction.from_callable(
            lambda z, j=j: np.array([mollify(u, MollifierSpec(j), zz)
                                     for zz in np.atleast_1d(z)]), 1, 4.0, 0.1)
        ratios.append(seminorm_holder(fj, alpha) / base)
    assert max(ratios) < 1.1
    assert all(np.isfinite(ratios))
    # convergence of f_j to u drives the ratio up toward 1 monotonically
    assert all(a < b for a, b in zip(ratios, ratios[1:]))


def test_schauder_signature_admissibility():
    assert schauder_signature("A1", 0.9, 0.2) == (0, 0.9, 0, pytest.approx(0.5))
    with pytest.raises(PreconditionError, match="2\\*sigma < alpha violated"):
        schauder_signature("A1", 0.3, 0.4)
    with pytest.raises(PreconditionError):
        schauder_signature("B1", 0.8, 0.4)  # alpha + 2 sigma > 1
    with pytest.raises(PreconditionError):
        schauder_signature("R_i", 1.0, None)  # needs alpha < 1
    assert schauder_signature("B3", 0.5, 1.0) == (0, 0.5, 2, pytest.approx(0.5))


def test_schauder_ratio_a1_stable():
    rep = schauder_report("A1", alpha=0.9, sigma=0.2, family_size=12, seed=0)
    assert math.isfinite(rep.constant)
    assert rep.constant > 0
    assert rep.stability_pass


def test_schauder_ratio_b3_classical_schauder():
    # sigma = 1 in the third smoothing band is the classical estimate for Hu=f
    rep = schauder_report("B3", alpha=0.5, sigma=1.0, family_size=8, seed=0)
    assert math.isfinite(rep.constant)
    assert rep.stability_pass


def test_schauder_riesz_case():
    rep = schauder_report("R_i", alpha=0.6, sigma=None, family_size=8, seed=0)
    assert math.isfinite(rep.constant)
    assert rep.stability_pass


def test_composition_identity_h_sigma():
    # H^sigma = H^(sigma - 1/2) o (1/2) sum_i (R_i^* A_{-i} + R_{-i}^* A_i)
    rng = np.random.default_rng(5)
    from hermite_frac.hermite import multi_indices
    c = SpectralCoeffs(1, 6, {nu: float(rng.normal()) for nu in multi_indices(1, 6)})
    sigma = 0.7
    half = {}
    one = riesz_spectral("R_i_star", (1,), ladder_apply(-1, c))
    two = riesz_spectral("R_i_star", (-1,), ladder_apply(1, c))
    for nu in set(one.coeffs) | set(two.coeffs):
        half[nu] = 0.5 * (one.get(nu) + two.get(nu))
    composed = multiplier_apply(MultiplierSpec(sigma - 0.5),
                                SpectralCoeffs(1, 7, half))
    direct = multiplier_apply(MultiplierSpec(sigma), c)
    for nu, v in direct.items():
        assert composed.get(nu) == pytest.approx(v, rel=1e-12)


def test_lemma_campaign_unknown_id():
    with pytest.raises(DomainError):
        lemma_campaign("9.9")


def test_samplers_deterministic_prefix():
    draw = pair_sampler(1)
    a = draw(np.random.default_rng(0), 10)
    b = draw(np.random.default_rng(0), 20)
    assert np.allclose(a["x"], b["x"][:10])
    t = triple_sampler(2)(np.random.default_rng(1), 5)
    assert t["s"].shape == (5,)
