"""Local radial solution near r = 0 as a fixed point of the Picard map

    T(phi) = xi,   xi'' = A phi^p (r / phi')^(n-1),   xi(0) = a0, xi'(0) = 0,

realised on truncated Taylor series of order 2*kappa.

The j-th output coefficient of ``T`` depends on the j-th input coefficient
only through the exact linear term ``-(n-1)/(j-1) * c_j`` (the other
contributions come from lower orders). Picard iteration is run on the
implicit form of that recursion, i.e. with the linear term moved to the
left, so each sweep fixes one more even order and the fixed point of ``T``
is reached after about ``kappa`` sweeps regardless of ``n``.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import ContractionError, ConvergenceError, InputError, RegimeError
from .problem import ProblemSpec
from .series import (
    TruncatedSeries,
    series_integrate,
    series_mul,
    series_r_over_deriv,
    series_real_power,
    truncate,
)

DEFAULT_DELTA = 0.05
DEFAULT_SIGMA = 0.1
DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 200


def default_kappa(n):
    return max(3, n)


def contraction_factor(n, kappa):
    """``(n - 1)/(2 kappa - 1)``: contraction of the top derivative under ``T``.

    The general form ``(n-1) a0^p a2^-n / (2 kappa - 1)`` loses its ``a0``
    dependence once ``a2^n = a0^p`` is imposed.
    """
    if kappa < 1:
        raise InputError("kappa must be >= 1")
    return (n - 1) / (2 * kappa - 1)


@dataclass
class SeriesSeed:
    spec: ProblemSpec
    a0: float
    kappa: int
    delta: float
    sigma: float
    series: TruncatedSeries
    iterations: int
    contraction_estimate: float
    residual: float
    band_ok: bool = True
    history: list = field(default_factory=list)

    @property
    def a2(self):
        return 2.0 * self.series.coeffs[2]

    def state(self, r):
        """``(u, u')`` from the series at radius ``r``."""
        return float(self.series(r)), float(self.series.eval_deriv(r))


def picard_map(phi, spec):
    """One application of ``T`` to the series ``phi`` (same order out)."""
    m = phi.order
    power = truncate(series_real_power(phi, spec.p), m - 1)
    h = series_r_over_deriv(phi)
    hn = series_real_power(h, spec.n - 1)
    rhs = spec.A * series_mul(power, hn)
    xi = series_integrate(series_integrate(rhs, 0.0), phi.coeffs[0])
    return truncate(xi, m)


def _diagonal(n, m):
    j = np.arange(m + 1, dtype=float)
    d = np.zeros(m + 1)
    d[3:] = (n - 1) / (j[3:] - 1.0)
    return d


def _scaled(coeffs, a0, ell):
    return np.abs(coeffs) * ell ** np.arange(coeffs.size) / a0


def _relaxed_picard(spec, a0, order, tol, max_iter):
    a2 = spec.central_curvature(a0)
    ell = spec.length_scale(a0)
    c = np.zeros(order + 1)
    c[0] = a0
    c[2] = 0.5 * a2
    phi = TruncatedSeries(c)
    diag = _diagonal(spec.n, order)
    history = []
    for it in range(1, max_iter + 1):
        out = picard_map(phi, spec).coeffs
        new = (out + diag * phi.coeffs) / (1.0 + diag)
        new[0] = a0
        new[2] = 0.5 * a2
        change = float(np.max(_scaled(new - phi.coeffs, a0, ell)))
        history.append(change)
        phi = TruncatedSeries(new)
        if change < tol:
            return phi, it, history
    raise ConvergenceError(f"series fixed point not reached in {max_iter} sweeps (last change {change:.3e})")


def _observed_contraction(spec, phi_ext, kappa, delta, eps=1e-4):
    """Lipschitz ratio of ``T`` in the seminorm ``sup_[0,delta] |f^(2 kappa)|``.

    Perturbations ``eps r^j`` with ``j = 2k, 2k+1, 2k+2`` are applied to the
    fixed point; each response is measured by the sup of its 2k-th
    derivative on a grid over ``[0, delta]`` and normalised the same way.
    """
    top = 2 * kappa
    base = picard_map(phi_ext, spec).coeffs
    rr = np.linspace(0.0, delta, 201)
    ratios = []
    for j in (top, top + 1, top + 2):
        if j > phi_ext.order:
            break
        bump = np.zeros(phi_ext.order + 1)
        bump[j] = eps * phi_ext.coeffs[0] / spec.length_scale(phi_ext.coeffs[0]) ** j
        resp = picard_map(TruncatedSeries(phi_ext.coeffs + bump), spec).coeffs - base
        ratios.append(_top_sup(resp, top, rr) / _top_sup(bump, top, rr))
    return float(max(ratios))


def _top_sup(coeffs, k, rr):
    d = np.array([factorial(j) / factorial(j - k) * coeffs[j] if j >= k else 0.0
                  for j in range(coeffs.size)])
    return float(np.max(np.abs(np.polynomial.polynomial.polyval(rr, d[k:]))))


def _band_ok(series, delta, sigma, kappa):
    """Membership in the band: |u^(j)(r) - a_j| <= sigma on [0, delta], j < 2 kappa."""
    rr = np.linspace(0.0, delta, 101)
    a = series.derivatives()
    f = series
    for j in range(2 * kappa):
        if np.max(np.abs(f(rr) - a[j])) > sigma:
            return False
        f = f.deriv()
    return True


def series_seed(spec, a0, kappa=None, delta=DEFAULT_DELTA, tol=DEFAULT_TOL,
                sigma=DEFAULT_SIGMA, max_iter=DEFAULT_MAX_ITER):
    """Fixed point of ``T`` for any exponent (no regime restriction).

    Local existence near the centre does not depend on ``p < n``; the
    supercritical and critical solvers start their trajectories here.
    """
    if kappa is None:
        kappa = default_kappa(spec.n)
    if not a0 > 0:
        raise InputError(f"central value must be positive, got {a0!r}")
    if not 0 < delta < 1 or not 0 < sigma < 1:
        raise InputError("delta and sigma must lie in (0, 1)")
    if 2 * kappa - 1 <= spec.n - 1:
        raise ContractionError(
            f"kappa={kappa} gives contraction factor {contraction_factor(spec.n, kappa):.3g} >= 1")
    order = 2 * kappa
    phi, iterations, history = _relaxed_picard(spec, a0, order, tol, max_iter)
    residual = float(np.max(_scaled(picard_map(phi, spec).coeffs - phi.coeffs, a0, spec.length_scale(a0))))
    if not residual < tol:
        raise ConvergenceError(f"fixed-point residual {residual:.3e} exceeds tol {tol:.1e}")
    phi_ext, _, _ = _relaxed_picard(spec, a0, order + 2 * kappa, tol, max_iter)
    contraction = _observed_contraction(spec, phi_ext, kappa, delta)
    return SeriesSeed(
        spec=spec,
        a0=float(a0),
        kappa=kappa,
        delta=float(delta),
        sigma=float(sigma),
        series=phi,
        iterations=iterations,
        contraction_estimate=contraction,
        residual=residual,
        band_ok=_band_ok(phi, delta, sigma, kappa),
        history=history,
    )


def fixed_point_seed(spec, a0, kappa=None, delta=DEFAULT_DELTA, tol=DEFAULT_TOL,
                     sigma=DEFAULT_SIGMA, max_iter=DEFAULT_MAX_ITER):
    """Converged series seed of an entire solution (requires ``p < n``)."""
    if spec.p >= spec.n:
        raise RegimeError(f"entire solutions need p < n (got n={spec.n}, p={spec.p})")
    return series_seed(spec, a0, kappa, delta, tol, sigma, max_iter)
