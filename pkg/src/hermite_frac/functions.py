"""Named smooth test functions with the derivative data the pointwise
operators need (gradient, Laplacian, bi-Laplacian).

Families parseable from the CLI:

    hermite:k            the k-th 1-D Hermite function (tensorized for n > 1)
    gauss:center,width   exp(-(x-c)^2 / (2 w^2)), per axis for n > 1
    bump:center,width    C_c-infinity bump supported on |x-c| < w
    modgauss:freq        cos(freq x) exp(-x^2/2)
    suite                the six-function Schwartz suite used by the tests

Derivatives are closed-form except for the bump's fourth derivative, which
falls back to central differences (it only enters O(delta^{4-2s}) shell
corrections).
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .exceptions import DomainError, PreconditionError
from .hermite import hermite_all_1d


def _as_points(x, n: int) -> tuple[np.ndarray, bool]:
    """Normalize x to shape (m, n); second value marks scalar input."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        if n != 1:
            raise DomainError(f"scalar point given for dimension {n}")
        return a.reshape(1, 1), True
    if a.ndim == 1:
        if n == 1:
            return a.reshape(-1, 1), False
        if a.size == n:
            return a.reshape(1, n), True
        raise DomainError(f"cannot interpret shape {a.shape} as points in R^{n}")
    if a.shape[1] != n:
        raise DomainError(f"points of shape {a.shape} do not lie in R^{n}")
    return a, False


class SmoothFunction:
    """Base: vectorized evaluation plus optional analytic derivative data."""

    dimension: int = 1
    name: str = "smooth"

    def __call__(self, x):
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def lap(self, x) -> float:
        raise NotImplementedError

    def bilap(self, x) -> float:
        return fd_bilap(self, x, self.dimension)

    @property
    def has_grad(self) -> bool:
        try:
            self.grad(np.zeros(self.dimension) if self.dimension > 1 else 0.0)
            return True
        except NotImplementedError:
            return False

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _scalar(v) -> float:
    return float(np.asarray(v).reshape(-1)[0])


def fd_grad(f: Callable, x, n: int, h: float = 1e-5) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        g[i] = (_scalar(f(x + e)) - _scalar(f(x - e))) / (2 * h)
    return g


def fd_lap(f: Callable, x, n: int, h: float = 1e-4) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = _scalar(f(x))
    total = 0.0
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        total += (_scalar(f(x + e)) - 2 * c + _scalar(f(x - e))) / (h * h)
    return total


def fd_bilap(f: Callable, x, n: int, h: float = 2e-2) -> float:
    lap_at = lambda y: fd_lap(f, y, n, h)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = lap_at(x)
    total = 0.0
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        total += (lap_at(x + e) - 2 * c + lap_at(x - e)) / (h * h)
    return total


class CGauss(SmoothFunction):
    """Re[kappa exp(-a (x - beta)^2)] in 1-D, kappa and beta possibly complex.

    A real beta gives a translated Gaussian; an imaginary part modulates it,
    e.g. cos(w x) e^{-x^2/2} = Re exp(-(x - i w)^2/2 - w^2/2).  All derivatives
    are polynomials in (x - beta) times the same exponential.
    """

    dimension = 1

    def __init__(self, kappa: complex, a: float, beta: complex, name: str = "cgauss"):
        if a <= 0:
            raise DomainError("Gaussian exponent a must be positive")
        self.kappa = complex(kappa)
        self.a = float(a)
        self.beta = complex(beta)
        self.name = name

    def _core(self, x):
        x = np.asarray(x, dtype=float)
        return self.kappa * np.exp(-self.a * (x - self.beta) ** 2)

    def __call__(self, x):
        pts, scalar = _as_points(x, 1)
        v = np.real(self._core(pts[:, 0]))
        return float(v[0]) if scalar else v

    def _deriv(self, x, order: int):
        xa = np.asarray(x, dtype=float)
        u = xa - self.beta
        a = self.a
        core = self._core(xa)
        if order == 1:
            poly = -2 * a * u
        elif order == 2:
            poly = 4 * a * a * u * u - 2 * a
        elif order == 4:
            poly = 16 * a ** 4 * u ** 4 - 48 * a ** 3 * u * u + 12 * a * a
        else:
            raise DomainError(f"derivative order {order} not implemented")
        return np.real(poly * core)

    def grad(self, x):
        pts, scalar = _as_points(x, 1)
        g = self._deriv(pts[:, 0], 1)
        return np.array([float(g[0])]) if scalar or g.size == 1 else g

    def lap(self, x):
        pts, _ = _as_points(x, 1)
        return float(self._deriv(pts[:, 0], 2)[0])

    def bilap(self, x):
        pts, _ = _as_points(x, 1)
        return float(self._deriv(pts[:, 0], 4)[0])


def gaussian(center: float = 0.0, width: float = 1.0) -> CGauss:
    return CGauss(1.0, 0.5 / width ** 2, center, name=f"gauss:{center},{width}")


def modulated_gaussian(freq: float, decay: float = 0.5, name: str | None = None) -> CGauss:
    """cos(freq x) e^{-decay x^2} as a complex-shifted Gaussian."""
    beta = -1j * freq / (2.0 * decay)
    kappa = complex(math.exp(-freq * freq / (4.0 * decay)))
    return CGauss(kappa, decay, beta, name=name or f"modgauss:{freq}")


class HermiteFn(SmoothFunction):
    """The 1-D Hermite function h_k with exact ladder-based derivatives."""

    dimension = 1

    def __init__(self, k: int):
        if k < 0:
            raise DomainError("Hermite degree must be >= 0")
        self.k = k
        self.name = f"hermite:{k}"

    def _values(self, x, upto: int):
        return hermite_all_1d(upto, np.asarray(x, dtype=float))

    def __call__(self, x):
        pts, scalar = _as_points(x, 1)
        v = self._values(pts[:, 0], self.k)[self.k]
        return float(v[0]) if scalar else v

    def grad(self, x):
        # h_k' = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}
        pts, _ = _as_points(x, 1)
        H = self._values(pts[:, 0], self.k + 1)
        d = -math.sqrt((self.k + 1) / 2.0) * H[self.k + 1]
        if self.k >= 1:
            d = d + math.sqrt(self.k / 2.0) * H[self.k - 1]
        return np.atleast_1d(d if d.size > 1 else float(d[0]))

    def lap(self, x):
        # h_k'' = (x^2 - (2k+1)) h_k
        pts, _ = _as_points(x, 1)
        xv = pts[0, 0]
        hk = float(self._values(pts[:, 0], self.k)[self.k][0])
        return (xv * xv - (2 * self.k + 1)) * hk

    def bilap(self, x):
        # h_k'''' = (2 + (x^2-l)^2) h_k + 4 x h_k' with l = 2k+1
        pts, _ = _as_points(x, 1)
        xv = pts[0, 0]
        lam = 2 * self.k + 1
        hk = float(self._values(pts[:, 0], self.k)[self.k][0])
        dk = float(self.grad(xv)[0])
        return (2.0 + (xv * xv - lam) ** 2) * hk + 4.0 * xv * dk


class Bump(SmoothFunction):
    """C_c-infinity bump: exp(1 - 1/(1 - r^2)) on |x-c| < w, zero outside."""

    dimension = 1

    def __init__(self, center: float = 0.0, width: float = 1.0):
        if width <= 0:
            raise DomainError("bump width must be positive")
        self.center = float(center)
        self.width = float(width)
        self.name = f"bump:{center},{width}"

    def __call__(self, x):
        pts, scalar = _as_points(x, 1)
        r = (pts[:, 0] - self.center) / self.width
        out = np.zeros_like(r)
        inside = np.abs(r) < 1.0
        q = r[inside] ** 2
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - q))
        return float(out[0]) if scalar else out

    def grad(self, x):
        pts, _ = _as_points(x, 1)
        r = (pts[:, 0] - self.center) / self.width
        out = np.zeros_like(r)
        inside = np.abs(r) < 1.0
        q = 1.0 - r[inside] ** 2
        out[inside] = np.exp(1.0 - 1.0 / q) * (-2.0 * r[inside] / q ** 2) / self.width
        return np.atleast_1d(out if out.size > 1 else float(out[0]))

    def lap(self, x):
        pts, _ = _as_points(x, 1)
        r = float(pts[0, 0] - self.center) / self.width
        if abs(r) >= 1.0:
            return 0.0
        q = 1.0 - r * r
        val = math.exp(1.0 - 1.0 / q)
        # d2/dr2 of exp(-1/q): ((2r/q^2)^2 - (2/q^2 + 8 r^2/q^3)) * ... sign bookkeeping below
        d2 = val * ((4.0 * r * r) / q ** 4 - 2.0 / q ** 2 - 8.0 * r * r / q ** 3)
        return d2 / self.width ** 2


class Constant(SmoothFunction):
    """A constant; useful to exercise the boundary-term-only path."""

    def __init__(self, value: float = 1.0, dimension: int = 1):
        self.value = float(value)
        self.dimension = dimension
        self.name = f"const:{value}"

    def __call__(self, x):
        pts, scalar = _as_points(x, self.dimension)
        v = np.full(pts.shape[0], self.value)
        return float(v[0]) if scalar else v

    def grad(self, x):
        return np.zeros(self.dimension)

    def lap(self, x):
        return 0.0

    def bilap(self, x):
        return 0.0


class ScaledSum(SmoothFunction):
    """Pointwise linear combination sum_i c_i f_i of same-dimension functions."""

    def __init__(self, terms: Sequence[tuple[float, SmoothFunction]], name: str = "sum"):
        if not terms:
            raise DomainError("empty combination")
        self.terms = [(float(c), f) for c, f in terms]
        self.dimension = self.terms[0][1].dimension
        if any(f.dimension != self.dimension for _, f in self.terms):
            raise DomainError("mixed dimensions in combination")
        self.name = name

    def __call__(self, x):
        out = None
        for c, f in self.terms:
            v = c * np.asarray(f(x), dtype=float)
            out = v if out is None else out + v
        return float(out) if np.ndim(out) == 0 else out

    def grad(self, x):
        return sum(c * np.asarray(f.grad(x)) for c, f in self.terms)

    def lap(self, x):
        return sum(c * f.lap(x) for c, f in self.terms)

    def bilap(self, x):
        return sum(c * f.bilap(x) for c, f in self.terms)


class ProductFn(SmoothFunction):
    """Tensor product u(x) = prod_i f_i(x_i) of 1-D factors."""

    def __init__(self, factors: Sequence[SmoothFunction], name: str | None = None):
        if any(f.dimension != 1 for f in factors):
            raise DomainError("tensor factors must be 1-D")
        self.factors = list(factors)
        self.dimension = len(factors)
        self.name = name or "x".join(f.name for f in factors)

    def _factor_values(self, pts):
        return [np.atleast_1d(f(pts[:, i])) for i, f in enumerate(self.factors)]

    def __call__(self, x):
        pts, scalar = _as_points(x, self.dimension)
        vals = self._factor_values(pts)
        out = np.ones(pts.shape[0])
        for v in vals:
            out = out * v
        return float(out[0]) if scalar else out

    def grad(self, x):
        pts, _ = _as_points(x, self.dimension)
        vals = [float(f(pts[0, i])) for i, f in enumerate(self.factors)]
        g = np.empty(self.dimension)
        for i, f in enumerate(self.factors):
            di = float(np.atleast_1d(f.grad(pts[0, i]))[0])
            rest = math.prod(v for j, v in enumerate(vals) if j != i)
            g[i] = di * rest
        return g

    def lap(self, x):
        pts, _ = _as_points(x, self.dimension)
        vals = [float(f(pts[0, i])) for i, f in enumerate(self.factors)]
        total = 0.0
        for i, f in enumerate(self.factors):
            d2 = f.lap(pts[0, i])
            rest = math.prod(v for j, v in enumerate(vals) if j != i)
            total += d2 * rest
        return total

    def bilap(self, x):
        pts, _ = _as_points(x, self.dimension)
        xs = [pts[0, i] for i in range(self.dimension)]
        vals = [float(f(xi)) for f, xi in zip(self.factors, xs)]
        d2 = [f.lap(xi) for f, xi in zip(self.factors, xs)]
        d4 = [f.bilap(xi) for f, xi in zip(self.factors, xs)]
        total = 0.0
        for i in range(self.dimension):
            rest = math.prod(v for j, v in enumerate(vals) if j != i)
            total += d4[i] * rest
        for i in range(self.dimension):
            for j in range(i + 1, self.dimension):
                rest = math.prod(v for k, v in enumerate(vals) if k not in (i, j))
                total += 2.0 * d2[i] * d2[j] * rest
        return total


def schwartz_suite(n: int = 1) -> list[SmoothFunction]:
    """The six-function test suite: Hermites, Gaussians, modulated Gaussians."""
    if n == 1:
        return [
            HermiteFn(0),
            HermiteFn(3),
            gaussian(0.0, 1.0),
            gaussian(0.7, 1.3),
            modulated_gaussian(2.0),
            modulated_gaussian(1.0, decay=0.8),
        ]
    base = schwartz_suite(1)
    out = []
    for i in range(6):
        factors = [base[(i + axis) % 6] for axis in range(n)]
        out.append(ProductFn(factors, name=f"suite{n}d:{i}"))
    return out


def _halton(index: int, base: int) -> float:
    f, r = 1.0, 0.0
    i = index + 1
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def gaussian_bump_family(count: int = 12, n: int = 1, seed: int = 0) -> list[SmoothFunction]:
    """Dilated/translated Gaussian bumps for the norm-ratio campaigns.

    Centers and widths follow a Halton sequence over [-2.25, 2.25] x
    [0.45, 1.8] (offset by the seed), so any prefix spreads over the whole
    box and doubling the family refines it instead of redistributing it.
    """
    out: list[SmoothFunction] = []
    for idx in range(count):
        c = -2.25 + 4.5 * _halton(idx + 7 * seed, 2)
        w = 0.45 + 1.35 * _halton(idx + 7 * seed, 3)
        if n == 1:
            out.append(gaussian(c, w))
        else:
            out.append(ProductFn([gaussian(c + 0.3 * axis, w) for axis in range(n)]))
    return out


def parse_family(spec: str, n: int = 1) -> list[SmoothFunction]:
    """Parse a declarative family name into a list of functions."""
    spec = spec.strip()
    if spec == "suite":
        return schwartz_suite(n)
    if spec.startswith("bumps"):
        return gaussian_bump_family(n=n)
    head, _, args = spec.partition(":")
    try:
        if head == "hermite":
            k = int(args)
            f: SmoothFunction = HermiteFn(k)
        elif head == "gauss":
            c, w = (float(a) for a in args.split(","))
            f = gaussian(c, w)
        elif head == "bump":
            c, w = (float(a) for a in args.split(","))
            f = Bump(c, w)
        elif head == "modgauss":
            f = modulated_gaussian(float(args))
        else:
            raise PreconditionError(f"unknown function family {spec!r}")
    except (ValueError, TypeError) as exc:
        raise PreconditionError(f"cannot parse family {spec!r}: {exc}") from exc
    if n == 1:
        return [f]
    if f.dimension == 1:
        return [ProductFn([f] * n, name=f.name + f"^'{n}d'")]
    return [f]
