"""Truncated Taylor series at r = 0.

A :class:`TruncatedSeries` of order ``M`` stores monomial coefficients
``c_0 .. c_M`` of ``f(r) = sum c_j r**j``. Results of arithmetic are cut at
order ``M``; the polynomial itself is what gets operated on, so nothing is
assumed about the (unknown) coefficients past ``M``.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import DegenerateProfileError, DomainError, OrderMismatchError, SingularReciprocalError

RECIPROCAL_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        if c.size == 0:
            raise ValueError("a series needs at least the constant coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self):
        return self.coeffs.size - 1

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def from_derivatives(cls, a):
        """Build from derivative-form values ``a_j = f^(j)(0)``."""
        a = np.asarray(a, dtype=float)
        return cls(a / np.array([factorial(j) for j in range(a.size)], dtype=float))

    def derivatives(self):
        """Derivative-form coefficients ``a_j = j! c_j``."""
        return self.coeffs * np.array([factorial(j) for j in range(self.coeffs.size)], dtype=float)

    def __call__(self, r):
        return np.polynomial.polynomial.polyval(r, self.coeffs)

    def deriv(self):
        """Derivative as a series of order ``M - 1`` (order 0 stays 0)."""
        if self.order == 0:
            return TruncatedSeries([0.0])
        return TruncatedSeries(self.coeffs[1:] * np.arange(1, self.order + 1))

    def eval_deriv(self, r):
        return self.deriv()(r)

    def __add__(self, other):
        return series_add(self, other)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return TruncatedSeries(self.coeffs * float(other))

    __rmul__ = __mul__

    def __sub__(self, other):
        return series_add(self, -1.0 * other)

    def __neg__(self):
        return -1.0 * self

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, coeffs={np.array2string(self.coeffs, precision=6)})"


def _check_orders(f, g):
    if f.order != g.order:
        raise OrderMismatchError(f"orders differ: {f.order} vs {g.order}")


def series_add(f, g):
    _check_orders(f, g)
    return TruncatedSeries(f.coeffs + g.coeffs)


def _cauchy(a, b, m):
    out = np.zeros(m + 1)
    for k in range(m + 1):
        out[k] = np.dot(a[: k + 1], b[k::-1])
    return out


def series_mul(f, g):
    """Cauchy product cut at the common order."""
    _check_orders(f, g)
    return TruncatedSeries(_cauchy(f.coeffs, g.coeffs, f.order))


def series_reciprocal(f):
    """Series of ``1/f`` via ``g_k = -(sum_{j=1..k} c_j g_{k-j}) / c_0``."""
    c = f.coeffs
    if abs(c[0]) <= RECIPROCAL_FLOOR:
        raise SingularReciprocalError(f"constant coefficient {c[0]!r} too close to zero")
    g = np.zeros_like(c)
    g[0] = 1.0 / c[0]
    for k in range(1, c.size):
        g[k] = -np.dot(c[1 : k + 1], g[k - 1 :: -1]) / c[0]
    return TruncatedSeries(g + 0.0)


def series_real_power(f, p):
    """Series of ``f**p`` for real ``p`` (requires ``c_0 > 0``).

    Uses ``c_0**p * (1 + v)**p`` with ``v = (f - c_0)/c_0``; the binomial
    sum terminates because ``v`` has no constant term.
    """
    c = f.coeffs
    if not c[0] > 0.0:
        raise DomainError(f"real power needs a positive constant coefficient, got {c[0]!r}")
    m = f.order
    v = c / c[0]
    v[0] = 0.0
    out = np.zeros(m + 1)
    out[0] = 1.0
    term = np.zeros(m + 1)
    term[0] = 1.0
    binom = 1.0
    for k in range(1, m + 1):
        term = _cauchy(term, v, m)
        binom *= (p - k + 1) / k
        if binom == 0.0:
            break
        out += binom * term
    return TruncatedSeries(c[0] ** p * out + 0.0)


def series_r_over_deriv(f):
    """Series of ``r / f'(r)`` for ``f`` with ``c_1 = 0`` and ``c_2 != 0``.

    ``f'(r)/r = sum_{j>=2} j c_j r**(j-2)`` is inverted to order ``M - 1``
    (the coefficient of order ``M - 1`` treats ``c_{M+1}`` as zero).
    """
    c = f.coeffs
    if f.order < 2 or c[1] != 0.0 or c[2] == 0.0:
        raise DegenerateProfileError("r/f' needs c_1 == 0 exactly and c_2 != 0")
    m = f.order
    g = np.zeros(m)
    idx = np.arange(2, m + 1)
    g[: m - 1] = idx * c[2:]
    return series_reciprocal(TruncatedSeries(g))


def series_integrate(f, constant=0.0):
    """Antiderivative with value ``constant`` at 0; order grows by one."""
    c = f.coeffs
    return TruncatedSeries(np.concatenate(([constant], c / np.arange(1, c.size + 1))))


def truncate(f, order):
    if order > f.order:
        return TruncatedSeries(np.concatenate((f.coeffs, np.zeros(order - f.order))))
    return TruncatedSeries(f.coeffs[: order + 1])
