"""Fractional powers H^s, shifted powers (H +/- 2k)^s, and fractional
integrals H^{-s}: spectral multipliers on Hermite coefficients, pointwise
kernel formulas with principal-value handling, and the boundary terms
B_s(x), B_{2k,s}(x), B_{-2k,s}(x) and H^{-s}1(x).

Pointwise route for H^s u(x):

    integral of (u(x) - u(z)) F_s(x,z) dz  +  u(x) B_s(x),

computed as an outer quadrature over |z - x| >= delta plus an analytic shell
correction from the near-diagonal expansion

    F_s(x, x+w) = c0 |w|^{-n-2s} - c1 (x.(x+w)) |w|^{2-n-2s} + smooth,

whose even moments against the Taylor remainder of u integrate in closed
form.  The shell error after correction is O(delta^{6-2s}); a delta -> delta/2
Richardson check guards the principal value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, NumericalError, PreconditionError, PrincipalValueError
from .functions import fd_bilap, fd_grad, fd_lap
from .heat import (heat_kernel_grid, heat_minus_partial_grid, heat_of_one_grid,
                   heat_one_minus_partial_grid)
from .hermite import SpectralCoeffs
from .quadrature import (DEFAULT_SPEC, T_HALF, MedaMesh, QuadratureSpec,
                         kernel_t_floor, meda_mesh, mu_head_exact,
                         mu_linear_lower_exact, mu_upper_exact, shell_mesh,
                         sphere_area)

KERNEL_KINDS = ("F_sigma", "F_2k_sigma", "F_neg2k_sigma", "F_neg_sigma")
BOUNDARY_KINDS = ("B_sigma", "B_2k_sigma", "B_neg2k_sigma", "H_neg_sigma_one")

# inner truncation radius for absolutely convergent kernels (F_{-s} types);
# the omitted ball contributes O(r_in^{2+2s}) against Lipschitz data
FRACINT_INNER_RADIUS = 1e-4
SK_ATOL = 1e-10


def gamma_neg(sigma: float) -> float:
    """Gamma(-sigma) for 0 < sigma < 1 via Gamma(-s) = -Gamma(1-s)/s."""
    if not 0.0 < sigma < 1.0:
        raise DomainError(f"sigma must lie in (0,1), got {sigma}")
    return -math.gamma(1.0 - sigma) / sigma


@dataclass(frozen=True)
class MultiplierSpec:
    """Spectral multiplier (2|nu| + n + shift)^sigma; shift is 0 or +/-2k."""

    sigma: float
    shift: int = 0

    def __post_init__(self):
        if self.shift % 2 != 0:
            raise DomainError(f"shift must be even, got {self.shift}")


@dataclass(frozen=True)
class KernelSpec:
    """One of the pointwise kernels, with its quadrature configuration."""

    kind: str
    sigma: float
    dimension: int = 1
    k: int = 0
    quad: QuadratureSpec = DEFAULT_SPEC

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if self.kind in ("F_2k_sigma", "F_neg2k_sigma") and self.k < 1:
            raise DomainError(f"shifted kernel {self.kind} needs k >= 1, got {self.k}")
        if self.kind == "F_neg_sigma":
            if not 0.0 < self.sigma <= 1.0:
                raise DomainError(f"F_neg_sigma needs 0 < sigma <= 1, got {self.sigma}")
        elif not 0.0 < self.sigma < 1.0:
            raise DomainError(f"{self.kind} needs 0 < sigma < 1, got {self.sigma}")


def project_Sk(c: SpectralCoeffs, k: int) -> SpectralCoeffs:
    """Zero every coefficient with |nu| < k (projection onto S_k)."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return SpectralCoeffs(c.dimension, c.max_degree,
                          {nu: v for nu, v in c.items() if nu.order >= k})


def multiplier_apply(spec: MultiplierSpec, c: SpectralCoeffs,
                     atol: float = SK_ATOL) -> SpectralCoeffs:
    """Coefficient-wise multiplication by (2|nu| + n + shift)^sigma.

    For a negative shift -2k the input must lie in S_k (coefficients below
    order k vanish up to atol); offending indices are reported.
    """
    n = c.dimension
    if spec.shift < 0:
        k = -spec.shift // 2
        bad = [nu for nu, v in c.items() if nu.order < k and abs(v) > atol]
        if bad:
            raise PreconditionError(
                f"(H{spec.shift:+d})^{spec.sigma} needs S_{k} data; "
                f"nonzero coefficients at {sorted(bad, key=lambda m: m.components)[:4]}")
        c = project_Sk(c, k)
    out = {}
    for nu, v in c.items():
        lam = 2 * nu.order + n + spec.shift
        if lam <= 0:
            raise PreconditionError(
                f"eigenvalue 2|nu|+n{spec.shift:+d} = {lam} not positive at nu={nu}")
        out[nu] = v * lam ** spec.sigma
    return SpectralCoeffs(n, c.max_degree, out)


# ---------------------------------------------------------------------------
# kernels


def _kernel_weights(ks: KernelSpec, mesh: MedaMesh) -> np.ndarray:
    """Meda-measure weights including shift factors e^{-/+2kt} and 1/Gamma."""
    if ks.kind == "F_sigma":
        return mesh.w / (-gamma_neg(ks.sigma))
    if ks.kind == "F_2k_sigma":
        return mesh.w * np.exp(-2.0 * ks.k * mesh.t) / (-gamma_neg(ks.sigma))
    if ks.kind == "F_neg2k_sigma":
        return mesh.w * np.exp(2.0 * ks.k * mesh.t) / (-gamma_neg(ks.sigma))
    return mesh.w / math.gamma(ks.sigma)  # F_neg_sigma


def _kernel_rho(ks: KernelSpec) -> float:
    return ks.sigma if ks.kind != "F_neg_sigma" else -ks.sigma


def kernel_mesh(ks: KernelSpec, r_min: float) -> MedaMesh:
    return meda_mesh(_kernel_rho(ks), kernel_t_floor(r_min), ks.quad)


def kernel_eval_batch(ks: KernelSpec, x, Z: np.ndarray,
                      mesh: MedaMesh | None = None) -> np.ndarray:
    """Kernel values at rows of Z (all distinct from x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1) if ks.dimension == 1 else Z.reshape(1, -1)
    dist = np.sqrt(np.sum((Z - x) ** 2, axis=1))
    r_min = float(dist.min()) if dist.size else 1.0
    if r_min == 0.0 and not (ks.kind == "F_neg_sigma" and ks.dimension < 2 * ks.sigma):
        raise DomainError(f"kernel {ks.kind} is singular on the diagonal x = z")
    if mesh is None:
        mesh = kernel_mesh(ks, max(r_min, 1e-8))
    w = _kernel_weights(ks, mesh)
    G = heat_kernel_grid(mesh.t, x, Z)
    if ks.kind == "F_neg2k_sigma":
        up = ~mesh.lower
        # the phi_2k subtraction applies only on s > 1/2; replace G there by
        # the stable Mehler-tail series
        G = G.copy()
        G[:, up] = heat_minus_partial_grid(mesh.t[up], x, Z, ks.k)
    return G @ w


def kernel_eval(ks: KernelSpec, x, z) -> float:
    """Pointwise kernel value F_*(x, z)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return float(kernel_eval_batch(ks, x, z.reshape(1, -1))[0])


# ---------------------------------------------------------------------------
# boundary terms


def _bk_linear_coeff(kind: str, k: int, x2: float) -> float:
    # -d/dt [e^{-+2kt} e^{-tH}1(x)] at t = 0
    if kind == "B_sigma":
        return x2
    if kind == "B_2k_sigma":
        return x2 + 2.0 * k
    return x2 - 2.0 * k  # B_neg2k_sigma


def boundary_term_eval(kind: str, sigma: float, x, n: int | None = None,
                       k: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """B_sigma(x), B_{2k,sigma}(x), B_{-2k,sigma}(x), or H^{-sigma}1(x).

    All use the corrected e^{-tH}1 normalization (cosh 2t)^{-n/2} and the
    exact Meda-measure moments for the subtracted constants / the head below
    the mesh floor.
    """
    if kind not in BOUNDARY_KINDS:
        raise DomainError(f"unknown boundary kind {kind!r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size if n is None else n
    x2 = float(np.sum(x * x))

    if kind == "H_neg_sigma_one":
        if not 0.0 < sigma <= 1.0:
            raise DomainError(f"H^(-sigma)1 needs 0 < sigma <= 1, got {sigma}")
        t_floor = 1e-12
        mesh = meda_mesh(-sigma, t_floor, spec)
        hof = heat_of_one_grid(mesh.t, x)
        if k:
            hof = hof * np.exp(-2.0 * k * mesh.t)
        val = mesh.integrate(hof)
        # analytic head on (0, t_floor]: e^{-2kt} e^{-tH}1 = 1 - (x^2+2k) t + O(t^2)
        val += mu_head_exact(-sigma, t_floor, (1.0, -(x2 + 2.0 * k)))
        return val / math.gamma(sigma)

    if not 0.0 < sigma < 1.0:
        raise DomainError(f"{kind} needs 0 < sigma < 1, got {sigma}")
    if kind in ("B_2k_sigma", "B_neg2k_sigma") and k < 1:
        raise DomainError(f"{kind} needs k >= 1, got {k}")

    t_floor = 1e-12
    mesh = meda_mesh(sigma, t_floor, spec)
    lo, up = mesh.lower, ~mesh.lower
    c1 = _bk_linear_coeff(kind, k, x2)
    hof = heat_of_one_grid(mesh.t, x)
    if kind == "B_sigma":
        f = hof
    elif kind == "B_2k_sigma":
        f = hof * np.exp(-2.0 * k * mesh.t)
    else:
        f = hof * np.exp(2.0 * k * mesh.t)

    # lower panel: integrate (f - 1 + c1 t) numerically, subtract c1 t exactly
    val = float(np.dot(mesh.w[lo], f[lo] - 1.0 + c1 * mesh.t[lo]))
    val -= c1 * mu_linear_lower_exact(sigma)

    # upper panel: integrate the decaying part numerically, the -1 exactly
    if kind == "B_neg2k_sigma":
        tail = heat_one_minus_partial_grid(mesh.t[up], x, k) * np.exp(2.0 * k * mesh.t[up])
        val += float(np.dot(mesh.w[up], tail))
    else:
        val += float(np.dot(mesh.w[up], f[up]))
    val -= mu_upper_exact(sigma)
    return val / gamma_neg(sigma)


# ---------------------------------------------------------------------------
# derivative data extraction for the pointwise operators


def _grad_at(u, x, n, allow_fd):
    g = getattr(u, "grad", None)
    if g is not None:
        try:
            return np.atleast_1d(np.asarray(g(x), dtype=float))
        except NotImplementedError:
            pass
    if not allow_fd:
        raise PreconditionError(
            f"{getattr(u, 'name', u)!r} supplies no gradient and finite differences are disabled")
    return fd_grad(u, x, n)


def _lap_at(u, x, n, allow_fd):
    l = getattr(u, "lap", None)
    if l is not None:
        try:
            return float(l(x))
        except NotImplementedError:
            pass
    if not allow_fd:
        raise PreconditionError(
            f"{getattr(u, 'name', u)!r} supplies no Laplacian and finite differences are disabled")
    return fd_lap(u, x, n)


def _bilap_at(u, x, n):
    b = getattr(u, "bilap", None)
    if b is not None:
        try:
            return float(b(x))
        except NotImplementedError:
            pass
    return fd_bilap(u, x, n)


def _shell_correction(sigma: float, n: int, delta: float, x: np.ndarray,
                      grad: np.ndarray, lap: float, bilap: float) -> float:
    """Closed-form integral of (u(x)-u(z)) F_sigma(x,z) over |z-x| < delta."""
    kappa = 1.0 / (-gamma_neg(sigma))
    omega = sphere_area(n)
    c0 = kappa * math.pi ** (-n / 2.0) * 4.0 ** sigma * math.gamma(n / 2.0 + sigma)
    val = -c0 * 0.5 * lap * (omega / n) * delta ** (2 - 2 * sigma) / (2 - 2 * sigma)
    b1 = n / 2.0 + sigma - 1.0
    if abs(b1) > 0.05:
        # skip in the log regime n = 2(1-sigma): the term is O(d^4 log d) there
        c1 = kappa * math.pi ** (-n / 2.0) * 4.0 ** (sigma - 1.0) * math.gamma(b1)
        val += c1 * (float(np.dot(grad, x)) + float(np.sum(x * x)) * lap / 2.0) \
            * (omega / n) * delta ** (4 - 2 * sigma) / (4 - 2 * sigma)
    val += -c0 * (bilap / 8.0) * (omega / (n * (n + 2))) \
        * delta ** (4 - 2 * sigma) / (4 - 2 * sigma)
    return val


def _eval_u(u, Z: np.ndarray) -> np.ndarray:
    vals = np.asarray(u(Z[:, 0] if Z.shape[1] == 1 else Z), dtype=float)
    return vals.reshape(Z.shape[0])


def frac_pointwise(u, sigma: float, x, spec: QuadratureSpec = DEFAULT_SPEC,
                   alpha: float | None = None, allow_fd: bool = True,
                   pv_tol: float = 1e-7, pv_check: bool | None = None) -> float:
    """H^sigma u(x) by the pointwise kernel formula.

    u must be evaluable on the truncated box and decaying; when 2 sigma >= alpha
    (alpha defaults to 1, i.e. u is assumed Lipschitz-smooth) the shell
    correction consumes gradient/Laplacian data, analytic if u provides it,
    central differences otherwise (disable with allow_fd=False to surface the
    precondition).  The principal value is certified by a delta -> delta/2
    Richardson check when sigma >= 1/2 (pv_check overrides).
    """
    if not 0.0 < sigma < 1.0:
        raise DomainError(f"sigma must lie in (0,1), got {sigma}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    eff_alpha = 1.0 if alpha is None else alpha
    if not 0.0 < eff_alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0,1], got {alpha}")
    # gradient data is the spec precondition in the principal-value regime;
    # the Laplacian/bi-Laplacian only feed the shell correction and may
    # always fall back to differences
    grad = _grad_at(u, x if n > 1 else float(x[0]), n,
                    allow_fd or 2.0 * sigma < eff_alpha)
    lap = _lap_at(u, x if n > 1 else float(x[0]), n, True)
    bilap = _bilap_at(u, x if n > 1 else float(x[0]), n)

    delta = spec.pv_delta
    ks = KernelSpec("F_sigma", sigma, dimension=n, quad=spec)
    mesh_nodes = shell_mesh(n, delta, spec.box)
    Z = x[None, :] + mesh_nodes.offsets
    ux = float(_eval_u(u, x.reshape(1, -1))[0])
    F = kernel_eval_batch(ks, x, Z)
    diffs = ux - _eval_u(u, Z)
    outer = float(np.dot(diffs * F, mesh_nodes.weights))
    shell = _shell_correction(sigma, n, delta, x, grad, lap, bilap)
    bterm = ux * boundary_term_eval("B_sigma", sigma, x, spec=spec)
    value = outer + shell + bterm

    if pv_check is None:
        pv_check = sigma >= 0.5
    if pv_check:
        ann = shell_mesh(n, delta / 2.0, delta, ratio=1.5)
        Za = x[None, :] + ann.offsets
        Fa = kernel_eval_batch(KernelSpec("F_sigma", sigma, dimension=n, quad=spec), x, Za)
        outer_half = outer + float(np.dot((ux - _eval_u(u, Za)) * Fa, ann.weights))
        shell_half = _shell_correction(sigma, n, delta / 2.0, x, grad, lap, bilap)
        value_half = outer_half + shell_half + bterm
        if abs(value_half - value) > pv_tol:
            raise PrincipalValueError(
                f"principal value did not stabilize under delta-halving at x={x}: "
                f"{value:.12e} vs {value_half:.12e} (delta={delta:g}, tol={pv_tol:g})",
                delta=delta, value=value, value_halved=value_half)
        value = value_half
    return value


def fracint_pointwise(u, sigma: float, x, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """H^{-sigma} u(x) = integral (u(z)-u(x)) F_{-sigma}(x,z) dz + u(x) H^{-sigma}1(x).

    Absolutely convergent: the kernel is integrable at the diagonal (the
    log-singular case n = 2 sigma included), so a geometric radial refinement
    down to FRACINT_INNER_RADIUS suffices, with the omitted ball contributing
    O(r_in^{2+2 sigma}) for Lipschitz data.
    """
    if not 0.0 < sigma <= 1.0:
        raise DomainError(f"sigma must lie in (0,1], got {sigma}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    ks = KernelSpec("F_neg_sigma", sigma, dimension=n, quad=spec)
    mesh_nodes = shell_mesh(n, FRACINT_INNER_RADIUS, spec.box)
    Z = x[None, :] + mesh_nodes.offsets
    ux = float(_eval_u(u, x.reshape(1, -1))[0])
    F = kernel_eval_batch(ks, x, Z)
    vals = _eval_u(u, Z) - ux
    integral = float(np.dot(vals * F, mesh_nodes.weights))
    if not math.isfinite(integral):
        raise NumericalError(f"fractional-integral quadrature failed at x={x}")
    return integral + ux * boundary_term_eval("H_neg_sigma_one", sigma, x, spec=spec)
