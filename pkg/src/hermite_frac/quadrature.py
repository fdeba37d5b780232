"""Shared quadrature machinery: the graded mesh for integrals against the
Meda measure d(mu_rho)(s) = dt/t^{1+rho}, and the radial-angular meshes used
by the pointwise singular integrals.

The Meda mesh lives in the t variable, where the measure is exactly
t^{-1-rho} dt: geometric Gauss-Legendre panels run from an integrand-dependent
floor up to atanh(1/2) (the image of s = 1/2) and on to T_MAX.  Geometric
panels keep the per-panel width ratio constant, which is what composite
Gauss-Legendre needs to integrate the algebraic endpoint behavior t^beta and
the boundary layers e^{-a/t} to near machine precision.  (A power-law graded
mesh (i/m)^p was tried first and rejected: its first panels have width ratios
of 64x and more, and Gauss-Legendre loses ~4 digits on t^beta across them.)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import DomainError

T_HALF = math.atanh(0.5)    # Meda time of s = 1/2
T_MAX = 50.0                # all integrands here decay at least like e^{-t}
GL_ORDER = 8                # Gauss-Legendre points per Meda panel
RADIAL_ORDER = 10           # Gauss-Legendre points per radial panel


@dataclass(frozen=True)
class QuadratureSpec:
    """Knobs for the graded meshes and the principal-value machinery.

    ratio_zero / ratio_one are the geometric grading ratios of the Meda mesh
    toward s = 0 and s = 1; panels caps the total panel count (the grading
    ratio toward 0 is widened if the cap would be exceeded).
    """

    panels: int = 200
    ratio_zero: float = 2.0
    ratio_one: float = 1.6
    pv_delta: float = 1e-3
    box: float = 12.0
    grid_step: float = 0.05

    def __post_init__(self):
        if self.pv_delta <= 0:
            raise DomainError(f"pv_delta must be positive, got {self.pv_delta}")
        if self.panels < 16:
            raise DomainError(f"panels must be >= 16, got {self.panels}")
        if self.box < 3:
            raise DomainError(f"box half-width must be >= 3, got {self.box}")
        if self.ratio_zero <= 1 or self.ratio_one <= 1:
            raise DomainError("grading ratios must exceed 1")

    def with_delta(self, delta: float) -> "QuadratureSpec":
        return replace(self, pv_delta=delta)


DEFAULT_SPEC = QuadratureSpec()


def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panelize(bounds: np.ndarray, order: int):
    """Gauss-Legendre nodes/weights on each [bounds_i, bounds_{i+1}]."""
    xg, wg = _leggauss(order)
    a, b = bounds[:-1], bounds[1:]
    mid = (0.5 * (a + b))[:, None]
    half = (0.5 * (b - a))[:, None]
    return (mid + half * xg[None, :]).ravel(), (half * wg[None, :]).ravel()


@dataclass(frozen=True)
class MedaMesh:
    """Nodes for integrating f against t^{-1-rho} dt on (t_floor, T_MAX)."""

    rho: float
    t: np.ndarray
    s: np.ndarray
    w: np.ndarray          # GL weight x t^{-1-rho}
    lower: np.ndarray      # mask: t <= T_HALF
    t_floor: float

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(np.asarray(values), self.w))


def meda_mesh(rho: float, t_floor: float, spec: QuadratureSpec = DEFAULT_SPEC,
              t_max: float = T_MAX) -> MedaMesh:
    t_floor = max(t_floor, 1e-60)
    upper = [T_HALF]
    while upper[-1] < t_max:
        upper.append(min(t_max, upper[-1] * spec.ratio_one))
    m1 = len(upper) - 1
    m0_cap = max(8, spec.panels - m1)
    need = math.log(T_HALF / t_floor) / math.log(spec.ratio_zero)
    ratio0 = spec.ratio_zero if need <= m0_cap else (T_HALF / t_floor) ** (1.0 / m0_cap)
    lower = [T_HALF]
    while lower[-1] > t_floor * (1 + 1e-12):
        lower.append(max(t_floor, lower[-1] / ratio0))
    bounds = np.concatenate([np.array(lower[::-1]), np.array(upper[1:])])
    t, w = _panelize(bounds, GL_ORDER)
    return MedaMesh(rho=rho, t=t, s=np.tanh(t), w=w * t ** (-1.0 - rho),
                    lower=t <= T_HALF, t_floor=t_floor)


def kernel_t_floor(r_min: float) -> float:
    """Floor for kernel integrands: below r_min^2/180 the Gaussian boundary
    layer e^{-r^2/(4t)} is under 1e-19 and the panel contributes nothing."""
    return max(1e-60, min(1e-3, r_min * r_min / 180.0))


def mu_upper_exact(rho: float) -> float:
    """Exact integral of t^{-1-rho} dt over (T_HALF, infinity), rho > 0."""
    if rho <= 0:
        raise DomainError("the tail of the Meda measure diverges for rho <= 0")
    return T_HALF ** (-rho) / rho


def mu_linear_lower_exact(rho: float) -> float:
    """Exact integral of t * t^{-1-rho} dt over (0, T_HALF], rho < 1."""
    if rho >= 1:
        raise DomainError("the linear moment of the Meda measure diverges for rho >= 1")
    return T_HALF ** (1.0 - rho) / (1.0 - rho)


def mu_head_exact(rho: float, t_floor: float, taylor: tuple[float, ...]) -> float:
    """Exact integral over (0, t_floor] of (sum_j c_j t^j) t^{-1-rho} dt.

    Used to reattach the analytic head below the mesh floor when the measure
    is integrable there (every supplied power must satisfy j > rho).
    """
    total = 0.0
    for j, c in enumerate(taylor):
        if c == 0.0:
            continue
        if j <= rho:
            raise DomainError(f"head power t^{j} is not mu_{rho}-integrable at 0")
        total += c * t_floor ** (j - rho) / (j - rho)
    return total


# ---------------------------------------------------------------------------
# spatial meshes for the pointwise singular integrals


def _sphere_nodes(n: int):
    """Antipodally symmetric direction set with weights summing to |S^{n-1}|."""
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = 32
        th = 2.0 * math.pi * np.arange(m) / m
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        return dirs, np.full(m, 2.0 * math.pi / m)
    if n == 3:
        mu, wmu = _leggauss(12)
        m_az = 16
        th = 2.0 * math.pi * np.arange(m_az) / m_az
        dirs, wts = [], []
        for mu_i, w_i in zip(mu, wmu):
            rho = math.sqrt(1.0 - mu_i * mu_i)
            for th_j in th:
                dirs.append([rho * math.cos(th_j), rho * math.sin(th_j), mu_i])
                wts.append(w_i * 2.0 * math.pi / m_az)
        return np.array(dirs), np.array(wts)
    raise DomainError(f"dimension {n} not supported (n <= 3)")


def radial_bounds(r_in: float, r_out: float, ratio: float = 2.0,
                  unit_from: float = 1.0) -> np.ndarray:
    """Geometric panels r_in -> unit_from, then unit-width panels to r_out."""
    geo_top = min(unit_from, r_out)
    bounds = [r_in]
    while bounds[-1] < geo_top:
        bounds.append(min(geo_top, bounds[-1] * ratio))
    b = bounds[-1]
    while b < r_out:
        b = min(r_out, b + 1.0)
        bounds.append(b)
    return np.array(bounds)


@dataclass(frozen=True)
class ShellMesh:
    """Quadrature for integrals over {r_in < |z - x| < r_out} in R^n.

    offsets has shape (npts, n); weights absorb r^{n-1} and the angular
    weight, so the integral of f is sum_i w_i f(x + offsets_i).
    """

    dimension: int
    offsets: np.ndarray
    weights: np.ndarray
    r: np.ndarray

    @property
    def count(self) -> int:
        return self.offsets.shape[0]


def shell_mesh(n: int, r_in: float, r_out: float, ratio: float = 2.0,
               radial_order: int = RADIAL_ORDER) -> ShellMesh:
    if not 0.0 < r_in < r_out:
        raise DomainError(f"need 0 < r_in < r_out, got ({r_in}, {r_out})")
    r, wr = _panelize(radial_bounds(r_in, r_out, ratio=ratio), radial_order)
    dirs, wd = _sphere_nodes(n)
    offsets = r[:, None, None] * dirs[None, :, :]
    weights = (wr * r ** (n - 1))[:, None] * wd[None, :]
    return ShellMesh(dimension=n,
                     offsets=offsets.reshape(-1, n),
                     weights=weights.ravel(),
                     r=np.repeat(r, dirs.shape[0]))


def sphere_area(n: int) -> float:
    """|S^{n-1}|: 2, 2 pi, 4 pi for n = 1, 2, 3."""
    return {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[n]
