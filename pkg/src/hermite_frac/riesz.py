"""Ladder operators A_{+-i} = -+ d/dx_i + x_i, first and second order
Hermite-Riesz transforms, and their pointwise kernel formulas.

Spectral side: A_i shifts Hermite indices (annihilation/creation) and the
transforms are ladder-multiplier compositions
    R_i = A_i H^{-1/2},   R_ij = A_i A_j H^{-1},   R_i^* = H^{-1/2} A_i.

Kernel side: the ladder derivatives of F_{-sigma} come from differentiating
the Gaussian integrand in closed form.  With p_i = -[s(x_i+z_i)+(x_i-z_i)/s]/2,

    A_i G = (eps_i p_i + x_i) G,
    A_i A_j G = [(eps_i p_i + x_i)(eps_j p_j + x_j)
                 + eps_i delta_ij (1 - eps_j (s + 1/s)/2)] G,

so no quadrature noise is amplified near the diagonal singularity.
"""
from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError, PreconditionError
from .fractional import (KernelSpec, MultiplierSpec, fracint_pointwise,
                         kernel_mesh, multiplier_apply)
from .functions import SmoothFunction, _as_points
from .heat import heat_kernel_grid, heat_of_one_grid
from .hermite import SpectralCoeffs
from .quadrature import (DEFAULT_SPEC, MedaMesh, QuadratureSpec, meda_mesh,
                         mu_head_exact, shell_mesh, sphere_area)

RIESZ_KERNEL_KINDS = ("AiF_neg_half", "R_ij", "AiF2_neg_half")
# inner radius below which the second-order kernels' shell is dropped; the
# antipodally symmetric mesh cancels the odd leading part exactly and the
# even remainder contributes O(r_in^2)
SECOND_ORDER_INNER_RADIUS = 1e-4


def check_ladder_index(i: int, dimension: int) -> int:
    if i == 0 or abs(i) > dimension:
        raise DomainError(f"ladder index {i} out of range for dimension {dimension}")
    return i


def ladder_apply(i: int, c: SpectralCoeffs) -> SpectralCoeffs:
    """A_i on coefficients: annihilation for i > 0, creation for i < 0."""
    check_ladder_index(i, c.dimension)
    axis = abs(i) - 1
    out: dict = {}
    if i > 0:
        for nu, v in c.items():
            k = nu[axis]
            if k == 0:
                continue
            tgt = nu.shift(axis, -1)
            out[tgt] = out.get(tgt, 0.0) + math.sqrt(2.0 * k) * v
        return SpectralCoeffs(c.dimension, max(c.max_degree - 1, 0), out)
    for nu, v in c.items():
        k = nu[axis]
        tgt = nu.shift(axis, +1)
        out[tgt] = out.get(tgt, 0.0) + math.sqrt(2.0 * k + 2.0) * v
    return SpectralCoeffs(c.dimension, c.max_degree + 1, out)


def ladder_word_apply(word: tuple[int, ...], c: SpectralCoeffs) -> SpectralCoeffs:
    """A_{i_1} ... A_{i_m} c, applied right to left."""
    for i in reversed(word):
        c = ladder_apply(i, c)
    return c


def a_deriv_eval(i: int, u, x, fd_step: float = 1e-5, allow_fd: bool = True) -> float:
    """(A_i u)(x) = (sign(i) d/dx_{|i|} + x_{|i|}) u(x) pointwise."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    check_ladder_index(i, n)
    axis = abs(i) - 1
    eps = 1.0 if i > 0 else -1.0
    g = getattr(u, "grad", None)
    du = None
    if g is not None:
        try:
            du = float(np.atleast_1d(g(x if n > 1 else float(x[0])))[axis])
        except NotImplementedError:
            du = None
    if du is None:
        if not allow_fd:
            raise PreconditionError(
                f"{getattr(u, 'name', u)!r} supplies no gradient and finite differences are disabled")
        e = np.zeros(n)
        e[axis] = fd_step
        du = (float(u(x + e if n > 1 else float(x[0] + fd_step)))
              - float(u(x - e if n > 1 else float(x[0] - fd_step)))) / (2 * fd_step)
    ux = float(u(x if n > 1 else float(x[0])))
    return eps * du + x[axis] * ux


class LadderedFunction(SmoothFunction):
    """A_i u as an evaluable function (value route for compositions)."""

    def __init__(self, u, i: int, dimension: int = 1):
        self.u = u
        self.i = i
        self.dimension = dimension
        self.name = f"A_{i}({getattr(u, 'name', 'u')})"

    def __call__(self, x):
        pts, scalar = _as_points(x, self.dimension)
        vals = np.array([a_deriv_eval(self.i, self.u, p if self.dimension > 1 else float(p[0]))
                         for p in pts])
        return float(vals[0]) if scalar else vals


def riesz_spectral(kind: str, indices: tuple[int, ...], c: SpectralCoeffs) -> SpectralCoeffs:
    """R_i, R_ij, or R_i^* on coefficients by ladder-multiplier composition."""
    if kind == "R_i":
        (i,) = indices
        return ladder_apply(i, multiplier_apply(MultiplierSpec(-0.5), c))
    if kind == "R_ij":
        i, j = indices
        return ladder_apply(i, ladder_apply(j, multiplier_apply(MultiplierSpec(-1.0), c)))
    if kind == "R_i_star":
        (i,) = indices
        return multiplier_apply(MultiplierSpec(-0.5), ladder_apply(i, c))
    raise DomainError(f"unknown Riesz kind {kind!r}")


# ---------------------------------------------------------------------------
# kernels by differentiation under the integral


def _pq_factors(mesh: MedaMesh, x: np.ndarray, Z: np.ndarray, axis: int):
    s = mesh.s
    xi = x[axis]
    zi = Z[:, axis][:, None]
    p = -0.5 * (s[None, :] * (xi + zi) + (xi - zi) / s[None, :])
    return p


def ladder_kernel_batch(indices: tuple[int, ...], x, Z: np.ndarray, sigma: float,
                        shift_k: int = 0, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """A_i F_{-sigma}(x, z) or A_i A_j F_{-sigma}(x, z) rows, ladder acting on x.

    shift_k > 0 inserts the e^{-2kt} factor, i.e. differentiates the kernel of
    (H + 2k)^{-sigma} instead.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    n = x.size
    for i in indices:
        check_ladder_index(i, n)
    dist = np.sqrt(np.sum((Z - x) ** 2, axis=1))
    mesh = kernel_mesh(KernelSpec("F_neg_sigma", sigma, dimension=n, quad=spec),
                       max(float(dist.min()), 1e-8))
    G = heat_kernel_grid(mesh.t, x, Z)
    if len(indices) == 1:
        (i,) = indices
        eps = 1.0 if i > 0 else -1.0
        q = eps * _pq_factors(mesh, x, Z, abs(i) - 1) + x[abs(i) - 1]
        fac = q
    else:
        i, j = indices
        ei = 1.0 if i > 0 else -1.0
        ej = 1.0 if j > 0 else -1.0
        qi = ei * _pq_factors(mesh, x, Z, abs(i) - 1) + x[abs(i) - 1]
        qj = ej * _pq_factors(mesh, x, Z, abs(j) - 1) + x[abs(j) - 1]
        fac = qi * qj
        if abs(i) == abs(j):
            fac = fac + ei * (1.0 - ej * 0.5 * (mesh.s + 1.0 / mesh.s))[None, :]
    w = mesh.w / math.gamma(sigma)
    if shift_k:
        w = w * np.exp(-2.0 * shift_k * mesh.t)
    return (G * fac) @ w


def deriv_kernel_batch(kind: str, x, Z: np.ndarray, sigma: float, i: int = 1,
                       j: int = 1, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Plain-derivative kernels of F_{-sigma} used by the estimate campaigns.

    kind: 'grad_i' (d/dx_i F), 'dxx' (d^2/dx_i dx_j F), 'x_dx' (x_i d/dx_j F),
          'xx' (x_i x_j F), 'plain' (F itself).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    n = x.size
    dist = np.sqrt(np.sum((Z - x) ** 2, axis=1))
    mesh = kernel_mesh(KernelSpec("F_neg_sigma", sigma, dimension=n, quad=spec),
                       max(float(dist.min()), 1e-8))
    G = heat_kernel_grid(mesh.t, x, Z)
    if kind == "plain":
        fac = np.ones_like(G)
    elif kind == "grad_i":
        fac = _pq_factors(mesh, x, Z, i - 1)
    elif kind == "dxx":
        pi = _pq_factors(mesh, x, Z, i - 1)
        pj = _pq_factors(mesh, x, Z, j - 1)
        fac = pi * pj
        if i == j:
            fac = fac - 0.5 * (mesh.s + 1.0 / mesh.s)[None, :]
    elif kind == "x_dx":
        fac = x[i - 1] * _pq_factors(mesh, x, Z, j - 1)
    elif kind == "xx":
        fac = np.full_like(G, x[i - 1] * x[j - 1])
    else:
        raise DomainError(f"unknown derivative kernel kind {kind!r}")
    return (G * fac) @ (mesh.w / math.gamma(sigma))


def riesz_kernel_eval(kind: str, indices: tuple[int, ...], x, z,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """One of the transform kernels A_iF_{-1/2}, R_ij = A_iA_jF_{-1}, A_iF_{2,-1/2}."""
    if kind not in RIESZ_KERNEL_KINDS:
        raise DomainError(f"unknown Riesz kernel kind {kind!r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.all(x == z):
        raise DomainError("Riesz kernels are singular on the diagonal x = z")
    Z = z.reshape(1, -1)
    if kind == "AiF_neg_half":
        return float(ladder_kernel_batch(indices[:1], x, Z, 0.5)[0])
    if kind == "AiF2_neg_half":
        return float(ladder_kernel_batch(indices[:1], x, Z, 0.5, shift_k=1)[0])
    return float(ladder_kernel_batch(indices[:2], x, Z, 1.0)[0])


# ---------------------------------------------------------------------------
# boundary factors A_i H^{-sigma} 1 and A_i A_j H^{-1} 1


def ladder_boundary_eval(indices: tuple[int, ...], x, sigma: float, shift_k: int = 0,
                         spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """A_i H^{-sigma}1(x), A_iA_j H^{-1}1(x), or the (H+2k)-shifted variants,
    by differentiating the e^{-tH}1 integrand in closed form."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    for i in indices:
        check_ladder_index(i, n)
    t_floor = 1e-12
    mesh = meda_mesh(-sigma, t_floor, spec)
    hof = heat_of_one_grid(mesh.t, x)
    d = -np.tanh(2.0 * mesh.t)
    if len(indices) == 1:
        (i,) = indices
        eps = 1.0 if i > 0 else -1.0
        fac = (1.0 + eps * d) * x[abs(i) - 1]
        head0 = x[abs(i) - 1]
    else:
        i, j = indices
        ei = 1.0 if i > 0 else -1.0
        ej = 1.0 if j > 0 else -1.0
        bi = 1.0 + ei * d
        bj = 1.0 + ej * d
        fac = bi * bj * x[abs(i) - 1] * x[abs(j) - 1]
        head0 = x[abs(i) - 1] * x[abs(j) - 1]
        if abs(i) == abs(j):
            fac = fac + ei * bj
            head0 = head0 + ei
    w = mesh.w
    if shift_k:
        w = w * np.exp(-2.0 * shift_k * mesh.t)
    val = float(np.dot(w, fac * hof))
    val += mu_head_exact(-sigma, t_floor, (head0,))
    return val / math.gamma(sigma)


# ---------------------------------------------------------------------------
# pointwise transforms


def _riesz_shell_coeff(n: int, sigma: float) -> float:
    """Leading odd coefficient D of A_i F_{-sigma}(x, x+w) ~ eps_i D w_i |w|^{2s-n-2}."""
    return math.gamma(n / 2.0 + 1.0 - sigma) * 4.0 ** (1.0 - sigma) \
        / (2.0 * math.pi ** (n / 2.0) * math.gamma(sigma))


def riesz_pointwise(kind: str, indices: tuple[int, ...], u, x,
                    spec: QuadratureSpec = DEFAULT_SPEC, allow_fd: bool = True) -> float:
    """Pointwise R_i u(x), R_ij u(x), or adjoint R_i^* u(x).

    R_i and the negative-index adjoint go through their kernel formulas with
    an analytic first-order shell correction; R_ij uses the antipodally
    symmetric mesh down to SECOND_ORDER_INNER_RADIUS where the gamma = 0
    cancelation makes the omitted shell O(r_in^2).  The positive-index
    adjoint R_i^* = H^{-1/2} A_i is evaluated as the fractional integral of
    the ladder derivative (its own kernel would live on (H-2)^{-1/2}, whose
    natural domain is S_1).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    ux = float(u(x if n > 1 else float(x[0])))

    if kind == "R_i":
        (i,) = indices
        return _first_order_pointwise(i, u, x, ux, sigma=0.5, shift_k=0,
                                      spec=spec, allow_fd=allow_fd)
    if kind == "R_i_star":
        (i,) = indices
        check_ladder_index(i, n)
        if i < 0:
            # R_{-i}^* = H^{-1/2} A_{-i} = A_{-i} (H+2)^{-1/2}
            return _first_order_pointwise(i, u, x, ux, sigma=0.5, shift_k=1,
                                          spec=spec, allow_fd=allow_fd)
        v = LadderedFunction(u, i, dimension=n)
        return fracint_pointwise(v, 0.5, x, spec)
    if kind == "R_ij":
        i, j = indices
        mesh_nodes = shell_mesh(n, SECOND_ORDER_INNER_RADIUS, spec.box)
        Z = x[None, :] + mesh_nodes.offsets
        K = ladder_kernel_batch((i, j), x, Z, 1.0, spec=spec)
        vals = np.asarray(u(Z[:, 0] if n == 1 else Z), dtype=float) - ux
        integral = float(np.dot(vals * K, mesh_nodes.weights))
        return integral + ux * ladder_boundary_eval((i, j), x, 1.0, spec=spec)
    raise DomainError(f"unknown Riesz kind {kind!r}")


def _first_order_pointwise(i: int, u, x, ux, sigma: float, shift_k: int,
                           spec: QuadratureSpec, allow_fd: bool) -> float:
    n = x.size
    check_ladder_index(i, n)
    eps = 1.0 if i > 0 else -1.0
    delta = spec.pv_delta
    mesh_nodes = shell_mesh(n, delta, spec.box)
    Z = x[None, :] + mesh_nodes.offsets
    K = ladder_kernel_batch((i,), x, Z, sigma, shift_k=shift_k, spec=spec)
    vals = np.asarray(u(Z[:, 0] if n == 1 else Z), dtype=float) - ux
    integral = float(np.dot(vals * K, mesh_nodes.weights))

    g = getattr(u, "grad", None)
    du = None
    if g is not None:
        try:
            du = float(np.atleast_1d(g(x if n > 1 else float(x[0])))[abs(i) - 1])
        except NotImplementedError:
            du = None
    if du is None:
        if not allow_fd:
            raise PreconditionError(
                f"{getattr(u, 'name', u)!r} supplies no gradient and finite differences are disabled")
        from .functions import fd_grad
        du = float(fd_grad(u, x if n > 1 else float(x[0]), n)[abs(i) - 1])
    D = _riesz_shell_coeff(n, sigma)
    shell = eps * D * du * (sphere_area(n) / n) * delta ** (2 * sigma) / (2 * sigma)

    boundary = ladder_boundary_eval((i,), x, sigma, shift_k=shift_k, spec=spec)
    return integral + shell + ux * boundary
