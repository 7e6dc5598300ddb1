"""Checks shared by the solvers. Residuals are computed from sampled output
by finite differences, never from a solver's internal derivatives."""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, RegimeError
from .kernels import stencil_derivatives

RESIDUAL_FLOOR = 1e-300
STENCIL_WIDTH = 5


@dataclass
class FitReport:
    slope_or_exponent: float
    target: float
    window: tuple
    r2: float
    n_points: int
    intercept: float = 0.0

    @property
    def rel_error(self):
        return abs(self.slope_or_exponent / self.target - 1.0) if self.target else abs(self.slope_or_exponent)


@dataclass
class ResidualReport:
    max_abs: float
    max_rel: float
    location: float
    n_samples: int


def exact_singular(spec):
    """Exponent and prefactor of ``u = beta |x|^alpha``, singular at the origin.

    ``alpha = 2n/(n - p)`` and ``beta = [alpha^n (alpha - 1) / A]^(1/(p - n))``.
    """
    n, p = spec.n, spec.p
    if p >= n:
        raise RegimeError("the singular entire solution exists only for p < n")
    alpha = 2.0 * n / (n - p)
    beta = (alpha**n * (alpha - 1.0) / spec.A) ** (1.0 / (p - n))
    return alpha, beta


def radial_residual(profile, width=STENCIL_WIDTH, skip_ends=True):
    """Relative residual ``|u'' (u'/r)^(n-1) - A u^p| / (A u^p)`` on the grid.

    ``u'`` and ``u''`` come from ``width``-point Fornberg stencils on the
    stored samples (any increasing grid). The origin, if sampled, is
    used as a stencil node but not as an evaluation point.
    """
    spec = profile.spec
    mask = np.isfinite(profile.u)
    r, u = profile.r[mask], profile.u[mask]
    if np.count_nonzero(r > 0) < max(3, width):
        raise InputError("residual needs at least max(3, stencil width) samples with r > 0")
    if np.any(np.diff(r) <= 0):
        raise InputError("radii must be strictly increasing")
    du, ddu = stencil_derivatives(r, u, width)
    pos = r > 0
    r, u, du, ddu = r[pos], u[pos], du[pos], ddu[pos]
    lhs = ddu * (du / r) ** (spec.n - 1)
    rhs = np.maximum(spec.A * u**spec.p, RESIDUAL_FLOOR)
    err = np.abs(lhs - rhs)
    rel = err / rhs
    if skip_ends:
        # one-sided stencils at both ends and across a handoff are less accurate
        edge = width // 2
        core = np.zeros(r.size, dtype=bool)
        core[edge:r.size - edge] = True
        err, rel, r = err[core], rel[core], r[core]
    k = int(np.argmax(rel))
    return ResidualReport(max_abs=float(np.max(err)), max_rel=float(rel[k]),
                          location=float(r[k]), n_samples=int(r.size))


def fit_power_law(xs, ys, window=None, target=np.nan, min_points=8):
    """Least-squares slope of ``log y`` against ``log x`` inside ``window``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if window is not None:
        lo, hi = window
        keep = (xs >= lo) & (xs <= hi)
        xs, ys = xs[keep], ys[keep]
    else:
        window = (float(np.min(xs)), float(np.max(xs))) if xs.size else (np.nan, np.nan)
    if xs.size < min_points:
        raise InputError(f"need at least {min_points} points in the fit window, got {xs.size}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise InputError("power-law fit needs positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitReport(slope_or_exponent=float(slope), target=float(target),
                     window=(float(window[0]), float(window[1])), r2=float(r2),
                     n_points=int(xs.size), intercept=float(intercept))


def exponent_identity_gap(n, p):
    """``2n/(n-p) + (n+1)/(p-n) - (n-1)/(n-p)``; zero for every ``p != n``.

    Links the ball rescaling exponent with the one used for inner domains of
    an ideal domain.
    """
    return 2.0 * n / (n - p) + (n + 1.0) / (p - n) - (n - 1.0) / (n - p)
