"""Heat semigroup of the harmonic oscillator: closed-form kernel, the Meda
change of parameters, the Mehler kernel and its partial sums, and application
of e^{-tH} to spectral or grid data.

Two parametrizations of the same kernel are used throughout:

    G_t(x,z)      = (2 pi sinh 2t)^{-n/2} exp(-[|x-z|^2 coth(2t)/2 + x.z tanh t]),
    G_{t(s)}(x,z) = ((1-s^2)/(4 pi s))^{n/2} exp(-[s|x+z|^2 + |x-z|^2/s]/4),

with s = tanh t, t = log((1+s)/(1-s))/2.  All large-t evaluation goes through
log-space so nothing overflows, and (1-s^2) is always computed as sech(t)^2
rather than from a saturated tanh.
"""
from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError
from .hermite import (SpectralCoeffs, hermite_all_1d, hermite_integral_1d,
                      multi_indices, quadrature_rule)

# series length so the dropped Mehler tail is below 1e-18 for t > atanh(1/2)
_TAIL_TERMS = 42


def meda_t_of_s(s: float) -> float:
    """t = log((1+s)/(1-s))/2 = atanh(s), mapping (0,1) to (0,inf)."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0,1), got {s}")
    return math.atanh(s)


def meda_s_of_t(t: float) -> float:
    """Inverse map s = tanh(t), stable for any t > 0."""
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    return math.tanh(t)


def mu_density(s: float, rho: float) -> float:
    """Density of d(mu_rho) against ds: 1/[(1-s^2) (atanh s)^{1+rho}].

    This is the Jacobian of dt/t^{1+rho} under the Meda substitution.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0,1), got {s}")
    t = math.atanh(s)
    return 1.0 / ((1.0 - s * s) * t ** (1.0 + rho))


def _log_sinh(y: float | np.ndarray):
    y = np.asarray(y, dtype=float)
    return y - math.log(2.0) + np.log1p(-np.exp(-2.0 * y))


def _log_cosh(y: float | np.ndarray):
    y = np.asarray(y, dtype=float)
    return y - math.log(2.0) + np.log1p(np.exp(-2.0 * y))


def heat_kernel(t: float, x, z) -> float:
    """G_t(x,z), the e^{-tH} kernel, evaluated in log-space."""
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if x.size != z.size:
        raise DomainError("x and z must have the same dimension")
    n = x.size
    lg = -0.5 * n * (math.log(2.0 * math.pi) + _log_sinh(2.0 * t)) \
        - 0.5 * np.sum((x - z) ** 2) / math.tanh(2.0 * t) \
        - np.dot(x, z) * math.tanh(t)
    return float(np.exp(lg))


def heat_kernel_s(s: float, x, z) -> float:
    """G at Meda parameter s: ((1-s^2)/(4 pi s))^{n/2} e^{-[s|x+z|^2+|x-z|^2/s]/4}."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0,1), got {s}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if x.size != z.size:
        raise DomainError("x and z must have the same dimension")
    n = x.size
    pref = ((1.0 - s * s) / (4.0 * math.pi * s)) ** (n / 2.0)
    expo = -0.25 * (s * np.sum((x + z) ** 2) + np.sum((x - z) ** 2) / s)
    return float(pref * np.exp(expo))


def heat_kernel_grid(T: np.ndarray, x, Z: np.ndarray) -> np.ndarray:
    """Matrix G_{t_j}(x, z_i) of shape (len(Z), len(T)).

    T holds Meda times t > 0; Z holds points as rows.  Used as the shared
    integrand of every kernel quadrature, so the s-dependent factors are all
    derived from t (sech^2 for 1-s^2) to stay accurate as s -> 1.
    """
    T = np.asarray(T, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    n = x.size
    s = np.tanh(T)
    sech2 = 1.0 / np.cosh(T) ** 2               # 1 - s^2, no cancellation
    log_pref = 0.5 * n * (np.log(sech2) - np.log(4.0 * math.pi * s))
    d2 = np.sum((Z - x) ** 2, axis=1)[:, None]
    p2 = np.sum((Z + x) ** 2, axis=1)[:, None]
    expo = -0.25 * (s[None, :] * p2 + d2 / s[None, :])
    return np.exp(log_pref[None, :] + expo)


def mehler(r: float, x, z) -> float:
    """The Mehler kernel M_r(x,z) = sum_j r^j sum_{|nu|=j} h_nu(x) h_nu(z)."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0,1), got {r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n = x.size
    pref = (math.pi * (1.0 - r * r)) ** (-n / 2.0)
    expo = -0.25 * ((1.0 - r) / (1.0 + r) * np.sum((x + z) ** 2)
                    + (1.0 + r) / (1.0 - r) * np.sum((x - z) ** 2))
    return float(pref * np.exp(expo))


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def layer_product(j: int, x, Z) -> np.ndarray:
    """sum_{|nu|=j} h_nu(x) h_nu(z) for each row z of Z."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    n = x.size
    Hx = hermite_all_1d(j, x)                        # (j+1, n)
    Hz = [hermite_all_1d(j, Z[:, i]) for i in range(n)]
    if n == 1:
        return Hx[j, 0] * Hz[0][j]
    out = np.zeros(Z.shape[0])
    for comp in _compositions(j, n):
        term = np.ones(Z.shape[0])
        cx = 1.0
        for i, k in enumerate(comp):
            cx *= Hx[k, i]
            term = term * Hz[i][k]
        out += cx * term
    return out


def mehler_partial(s: float, x, z, k: int) -> float:
    """phi_2k(x,z,s): the first k layers of the G_{t(s)} series, cut to s > 1/2.

    Returns 0 for s <= 1/2 (the chi_(1/2,1) factor).
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0,1), got {s}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if s <= 0.5:
        return 0.0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n = x.size
    r = (1.0 - s) / (1.0 + s)
    total = 0.0
    for j in range(k):
        total += r ** (j + n / 2.0) * layer_product(j, x, z.reshape(1, -1))[0]
    return total


def heat_minus_partial_grid(T: np.ndarray, x, Z: np.ndarray, k: int) -> np.ndarray:
    """[G_{t(s)} - phi_2k](x, z_i) for t_j > atanh(1/2), as the stable tail series
    sum_{j>=k} e^{-(2j+n)t} sum_{|nu|=j} h_nu(x) h_nu(z).

    Direct subtraction cancels catastrophically once both terms are ~e^{-2kt};
    the series keeps every summand positive-signed in the exponent.
    """
    T = np.asarray(T, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    jmax = k + _TAIL_TERMS
    if n == 1:
        Hx = hermite_all_1d(jmax, x)[k:jmax, 0]
        Hz = hermite_all_1d(jmax, Z[:, 0])[k:jmax]
        E = np.exp(-np.outer(2 * np.arange(k, jmax) + 1, T))
        return (Hz * Hx[:, None]).T @ E
    out = np.zeros((Z.shape[0], T.size))
    for j in range(k, jmax):
        P = layer_product(j, x, Z)
        out += P[:, None] * np.exp(-(2 * j + n) * T)[None, :]
    return out


def heat_of_one(t: float, x) -> float:
    """e^{-tH}1(x) = (cosh 2t)^{-n/2} e^{-tanh(2t)|x|^2/2}.

    The prefactor carries no 2*pi: direct quadrature of G_t against dz and the
    t -> 0 limit e^{-0H}1 = 1 both force this normalization.
    """
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    lg = -0.5 * n * _log_cosh(2.0 * t) - 0.5 * math.tanh(2.0 * t) * np.sum(x * x)
    return float(np.exp(lg))


def heat_of_one_grid(T: np.ndarray, x) -> np.ndarray:
    """e^{-t H}1(x) for an array of times."""
    T = np.asarray(T, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    lg = -0.5 * n * _log_cosh(2.0 * T) - 0.5 * np.tanh(2.0 * T) * np.sum(x * x)
    return np.exp(lg)


_INT_CACHE: dict[int, float] = {}


def _hermite_integral(k: int) -> float:
    if k not in _INT_CACHE:
        if k % 2 == 1:
            _INT_CACHE[k] = 0.0
        else:
            rule = quadrature_rule(220)
            _INT_CACHE[k] = hermite_integral_1d(k, rule)
    return _INT_CACHE[k]


def heat_one_minus_partial_grid(T: np.ndarray, x, k: int) -> np.ndarray:
    """integral over z of [G_{t(s)} - phi_2k](x, z), for t_j > atanh(1/2).

    Same stable tail series as heat_minus_partial_grid with each layer
    integrated in closed form: sum_{j>=k} e^{-(2j+n)t} m_j(x), where
    m_j(x) = sum_{|nu|=j} h_nu(x) * prod_i (integral of h_{nu_i}).
    """
    T = np.asarray(T, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    jmax = k + _TAIL_TERMS
    Hx = hermite_all_1d(jmax, x)
    out = np.zeros(T.size)
    for j in range(k, jmax):
        if n == 1:
            mj = Hx[j, 0] * _hermite_integral(j)
        else:
            mj = 0.0
            for comp in _compositions(j, n):
                term = 1.0
                for i, m in enumerate(comp):
                    term *= Hx[m, i] * _hermite_integral(m)
                mj += term
        out += mj * np.exp(-(2 * j + n) * T)
    return out


def heat_apply(t: float, u):
    """Apply e^{-tH}.

    SpectralCoeffs: multiply each coefficient by e^{-t(2|nu|+n)}.
    GridFunction:  integrate G_t(x, .) u(.) over the grid; the kernel
    factorizes across axes, so this is one 1-D kernel matrix applied per axis
    (trapezoid weights on the uniform grid).
    """
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if isinstance(u, SpectralCoeffs):
        n = u.dimension
        return u.map(lambda nu, c: c * math.exp(-t * (2 * nu.order + n)))

    from .holder import GridFunction
    if isinstance(u, GridFunction):
        axis = u.axis
        h = u.step
        w = np.full(axis.size, h)
        w[0] = w[-1] = 0.5 * h
        # 1-D kernel matrix K[i, j] = G_t(axis_i, axis_j) * w_j
        diff2 = (axis[:, None] - axis[None, :]) ** 2
        prod = axis[:, None] * axis[None, :]
        lg = -0.5 * (math.log(2.0 * math.pi) + float(_log_sinh(2.0 * t))) \
            - 0.5 * diff2 / math.tanh(2.0 * t) - prod * math.tanh(t)
        K = np.exp(lg) * w[None, :]
        vals = u.values
        for _ in range(u.dimension):
            vals = np.tensordot(vals, K, axes=([0], [1]))
        return GridFunction(dimension=u.dimension, half_width=u.half_width,
                            step=u.step, values=vals)
    raise DomainError(f"heat_apply expects SpectralCoeffs or GridFunction, got {type(u)!r}")
