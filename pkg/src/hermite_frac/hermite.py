"""Multi-dimensional Hermite functions, Gauss-Hermite quadrature, and
analysis/synthesis between point evaluations and spectral coefficients.

The basis used everywhere is the L^2-orthonormal Hermite *functions*
h_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}, evaluated through the
normalized two-term recurrence

    h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x),

which keeps every intermediate bounded (no factorials, no overflow).
In n dimensions h_nu(x) = prod_i h_{nu_i}(x_i) and the eigenvalues of the
oscillator -Lap + |x|^2 are 2|nu| + n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as _iproduct
from typing import Callable, Iterable, Iterator

import numpy as np

from .exceptions import DomainError

# Folding e^{x^2} back into Gauss-Hermite weights overflows once the largest
# node squared passes ~700; m = 320 keeps x_max^2 < 620.
MAX_QUADRATURE_NODES = 320


class MultiIndex:
    """Immutable multi-index nu in N_0^n addressing one Hermite function."""

    __slots__ = ("components", "_order")

    def __init__(self, components: Iterable[int]):
        comp = tuple(int(c) for c in components)
        if any(c < 0 for c in comp):
            raise DomainError(f"multi-index components must be >= 0, got {comp}")
        object.__setattr__(self, "components", comp)
        object.__setattr__(self, "_order", sum(comp))

    @staticmethod
    def of(*components: int) -> "MultiIndex":
        return MultiIndex(components)

    @property
    def order(self) -> int:
        return self._order

    @property
    def dimension(self) -> int:
        return len(self.components)

    def shift(self, axis: int, step: int) -> "MultiIndex":
        comp = list(self.components)
        comp[axis] += step
        return MultiIndex(comp)

    def __getitem__(self, i: int) -> int:
        return self.components[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __hash__(self) -> int:
        return hash(self.components)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiIndex):
            return self.components == other.components
        if isinstance(other, tuple):
            return self.components == other
        return NotImplemented

    def __repr__(self) -> str:
        return f"MultiIndex{self.components}"

    def __setattr__(self, name, value):
        raise AttributeError("MultiIndex is immutable")


def as_multi_index(nu) -> MultiIndex:
    return nu if isinstance(nu, MultiIndex) else MultiIndex(nu)


def multi_indices(dimension: int, max_degree: int) -> list[MultiIndex]:
    """All nu in N_0^dimension with |nu| <= max_degree, lexicographic."""
    out = []
    for comp in _iproduct(range(max_degree + 1), repeat=dimension):
        if sum(comp) <= max_degree:
            out.append(MultiIndex(comp))
    return out


@dataclass
class SpectralCoeffs:
    """Truncated Hermite expansion: coefficients <f, h_nu> for |nu| <= max_degree.

    Absent keys mean a zero coefficient.
    """

    dimension: int
    max_degree: int
    coeffs: dict[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[MultiIndex, float] = {}
        for nu, c in self.coeffs.items():
            nu = as_multi_index(nu)
            if nu.dimension != self.dimension:
                raise DomainError(
                    f"coefficient index {nu} has dimension {nu.dimension}, expected {self.dimension}")
            if nu.order > self.max_degree:
                raise DomainError(
                    f"coefficient index {nu} has order {nu.order} > max_degree {self.max_degree}")
            clean[nu] = float(c)
        self.coeffs = clean

    def get(self, nu) -> float:
        return self.coeffs.get(as_multi_index(nu), 0.0)

    def items(self):
        return self.coeffs.items()

    def map(self, fn: Callable[[MultiIndex, float], float]) -> "SpectralCoeffs":
        """New coefficients fn(nu, c_nu) on the same index set."""
        return SpectralCoeffs(self.dimension, self.max_degree,
                              {nu: fn(nu, c) for nu, c in self.coeffs.items()})

    def inner(self, other: "SpectralCoeffs") -> float:
        """l^2 pairing sum_nu c_nu d_nu (Parseval inner product)."""
        if other.dimension != self.dimension:
            raise DomainError("dimension mismatch in coefficient inner product")
        small, big = (self, other) if len(self.coeffs) <= len(other.coeffs) else (other, self)
        return sum(c * big.get(nu) for nu, c in small.items())

    def norm2(self) -> float:
        return math.sqrt(sum(c * c for c in self.coeffs.values()))


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes with the e^{-x^2} weight folded out, so that
    sum_i w_i f(x_i) approximates the plain Lebesgue integral of f for
    functions with Gaussian decay (Hermite-function products in particular).
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise DomainError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise DomainError("weights must be positive")

    @property
    def count(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(np.asarray(values), self.weights))


def hermite_eval_1d(k: int, x) -> float | np.ndarray:
    """Orthonormal Hermite function h_k at x (scalar or array), k >= 0."""
    if k < 0:
        raise DomainError(f"degree must be >= 0, got {k}")
    scalar = np.isscalar(x)
    vals = hermite_all_1d(k, np.atleast_1d(np.asarray(x, dtype=float)))[k]
    return float(vals[0]) if scalar else vals


def hermite_all_1d(kmax: int, x: np.ndarray) -> np.ndarray:
    """Matrix H[k, j] = h_k(x_j) for k = 0..kmax via the stable recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if kmax == 0:
        return out
    out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] \
            - math.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


def eval_multi(nu, x) -> float:
    """h_nu(x) = prod_i h_{nu_i}(x_i)."""
    nu = as_multi_index(nu)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != nu.dimension:
        raise DomainError(f"point has dimension {x.size}, index has {nu.dimension}")
    val = 1.0
    for k, xi in zip(nu, x):
        val *= hermite_eval_1d(k, xi)
    return val


def quadrature_rule(m: int) -> QuadratureRule:
    """Gauss-Hermite rule with m nodes, weight e^{-x^2} folded out."""
    if m < 1:
        raise DomainError(f"node count must be >= 1, got {m}")
    if m > MAX_QUADRATURE_NODES:
        raise DomainError(f"node count {m} exceeds cap {MAX_QUADRATURE_NODES}")
    nodes, w = np.polynomial.hermite.hermgauss(m)
    return QuadratureRule(nodes=nodes, weights=w * np.exp(nodes * nodes))


def default_degree(dimension: int) -> int:
    """Default truncation: 64 in 1-D, 32 per axis for n = 2, 3."""
    return 64 if dimension == 1 else 32


def default_rule(max_degree: int) -> QuadratureRule:
    return quadrature_rule(min(MAX_QUADRATURE_NODES, 2 * max_degree + 32))


def expand(f: Callable, n: int, N: int, rule: QuadratureRule | None = None) -> SpectralCoeffs:
    """Coefficients <f, h_nu> for all |nu| <= N by tensorized quadrature.

    f is called with an array of shape (npoints, n) and must return the
    corresponding values (a scalar function is fine for n = 1).
    """
    if rule is None:
        rule = default_rule(N)
    nodes, weights = rule.nodes, rule.weights
    H = hermite_all_1d(N, nodes)                      # (N+1, m)
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)   # (m^n, n)
    fv = np.asarray(f(pts[:, 0] if n == 1 else pts), dtype=float).reshape((rule.count,) * n)
    # fold quadrature weights into the function values axis by axis
    wf = fv
    for axis in range(n):
        shape = [1] * n
        shape[axis] = rule.count
        wf = wf * weights.reshape(shape)
    # contract each axis against the Hermite value matrix
    tensor = wf
    for _ in range(n):
        tensor = np.tensordot(tensor, H, axes=([0], [1]))
    # tensor now has shape (N+1,)*n with entry [k1,...,kn] = <f, h_(k1..kn)>
    coeffs = {}
    for nu in multi_indices(n, N):
        coeffs[nu] = float(tensor[nu.components])
    return SpectralCoeffs(n, N, coeffs)


def synthesize(c: SpectralCoeffs, x) -> float:
    """Sum_nu c_nu h_nu(x) at a single point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != c.dimension:
        raise DomainError(f"point has dimension {x.size}, coefficients have {c.dimension}")
    return float(synthesize_many(c, x.reshape(1, -1))[0])


def synthesize_many(c: SpectralCoeffs, X: np.ndarray) -> np.ndarray:
    """Vectorized synthesis at points X of shape (npoints, dimension)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if c.dimension == 1 else X.reshape(1, -1)
    if X.shape[1] != c.dimension:
        raise DomainError(f"points have dimension {X.shape[1]}, coefficients have {c.dimension}")
    if not c.coeffs:
        return np.zeros(X.shape[0])
    kmax = max(max(nu.components) for nu in c.coeffs)
    Hs = [hermite_all_1d(kmax, X[:, i]) for i in range(c.dimension)]
    out = np.zeros(X.shape[0])
    for nu, coef in c.items():
        term = np.full(X.shape[0], coef)
        for i, k in enumerate(nu):
            term = term * Hs[i][k]
        out += term
    return out


def hermite_integral_1d(k: int, rule: QuadratureRule | None = None) -> float:
    """The plain integral of h_k over the real line (0 for odd k)."""
    if k % 2 == 1:
        return 0.0
    if rule is None:
        rule = quadrature_rule(200)
    return rule.integrate(hermite_eval_1d(k, rule.nodes))
