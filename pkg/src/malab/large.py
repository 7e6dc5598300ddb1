"""Large radial solutions on balls for p > n and the critical case p = n.

A trajectory whose maximal existence radius equals ``R`` is the radial large
solution of the ball ``B_R``; it is found by shooting on the central value.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantError, RangeError, RegimeError
from .radial import (
    CAP_REACHED,
    COMPLETED,
    IntegratorControls,
    RadialProfile,
    blowup_radius,
    default_grid,
    integrate_log,
    seed_start,
)
from .verification import fit_power_law

A0_RANGE = (1e-8, 1e8)
RADIUS_TOL = 1e-8
BRACKET_TOL = 1e-8
FIT_WINDOW = (1e-4, 1e-2)
FIT_POINTS = 200
LOG_CAP = 1e300
ORDER_TOL = 1e-10


@dataclass
class LargeSolutionFit:
    spec: object
    R: float
    a_star: float
    a_bracket: tuple
    r_star: float
    profile: RadialProfile
    alpha_fit: float
    alpha_target: float
    fit_window: tuple
    fit_r2: float
    bisection_steps: int = 0

    @property
    def bracket_width(self):
        return self.a_bracket[1] - self.a_bracket[0]

    @property
    def alpha_rel_error(self):
        return abs(self.alpha_fit / self.alpha_target - 1.0)


def _find_bracket(radius_of, R):
    """Doubling/halving from a0 = 1 until r*(lo) > R > r*(hi)."""
    lo = hi = 1.0
    r_lo = r_hi = radius_of(1.0)
    while r_lo <= R:
        lo *= 0.5
        if lo < A0_RANGE[0]:
            raise RangeError(f"no central value in {A0_RANGE} blows up at R={R:g}")
        r_lo = radius_of(lo)
    while r_hi >= R:
        hi *= 2.0
        if hi > A0_RANGE[1]:
            raise RangeError(f"no central value in {A0_RANGE} blows up at R={R:g}")
        r_hi = radius_of(hi)
    # the first doubling step may have overshot on the other side
    if lo == 1.0 and hi > 1.0:
        lo = 0.5 * hi
    if hi == 1.0 and lo < 1.0:
        hi = 2.0 * lo
    return lo, hi


def shoot_central_value(spec, R, controls=None):
    """Bisection in ``log a0`` on the decreasing map ``a0 -> r*(a0)``.

    Stops once the point estimate satisfies ``|r* - R| < 1e-8 R`` and the
    bracket is narrower than ``1e-8 a0``. Returns ``(a0, bracket, r*, steps)``.
    """
    if not spec.p > spec.n:
        raise RegimeError("large solutions on balls need p > n")
    if not R > 0:
        raise InputError("ball radius must be positive")
    cache = {}

    def radius_of(a0):
        if a0 not in cache:
            cache[a0] = blowup_radius(spec, a0, controls).r_star
        return cache[a0]

    lo, hi = _find_bracket(radius_of, R)
    steps = 0
    while True:
        mid = float(np.sqrt(lo * hi))
        r_mid = radius_of(mid)
        steps += 1
        if r_mid > R:
            lo = mid
        else:
            hi = mid
        if abs(r_mid - R) < RADIUS_TOL * R and hi - lo < BRACKET_TOL * mid:
            return mid, (lo, hi), r_mid, steps
        if steps > 200:
            raise RangeError("bisection on the central value did not settle")


def solve_large_on_ball(spec, R, controls=None, window=FIT_WINDOW, n_fit=FIT_POINTS):
    """Radial large solution of ``B_R`` and its boundary blow-up exponent.

    The profile is sampled up to distance ``window[0] * R`` from the
    boundary; ``log u`` is fitted against ``log(R - r)`` over the window.
    """
    a_star, bracket, r_star, steps = shoot_central_value(spec, R, controls)
    _, state0 = seed_start(spec, a_star)
    d = np.geomspace(window[1] * R, window[0] * R, n_fit)
    inner = default_grid(state0[0], R - d[0])
    grid = np.unique(np.concatenate((inner, R - d)))
    ctl = IntegratorControls(rel_tol=1e-12, abs_tol=1e-14, value_cap=LOG_CAP)
    prof = integrate_log(spec, state0, grid[-1], ctl, r_out=grid)
    if prof.status != COMPLETED:
        raise InvariantError(f"trajectory blew up at r={prof.r_end:.6g} before the fit window closed")
    keep = prof.r >= R - d[0] * (1 + 1e-12)
    dist = R - prof.r[keep]
    fit = fit_power_law(dist, np.exp(prof.log_u[keep]), window=None)
    alpha = spec.blowup_exponent()
    return LargeSolutionFit(spec=spec, R=float(R), a_star=a_star, a_bracket=bracket, r_star=r_star,
                            profile=prof, alpha_fit=-fit.slope_or_exponent, alpha_target=alpha,
                            fit_window=(float(window[0] * R), float(window[1] * R)), fit_r2=fit.r2,
                            bisection_steps=steps)


def central_decay_table(spec, radii, controls=None):
    """Rows ``(R, a_star, a_star R^(2n/(p-n)))`` for increasing radii."""
    radii = [float(R) for R in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InputError("radii must be strictly increasing")
    k = spec.scaling_exponent()
    rows = []
    for R in radii:
        a_star = shoot_central_value(spec, R, controls)[0]
        rows.append((R, a_star, a_star * R**k))
    return np.array(rows)


def borderline_demo(spec, a0, r_max, controls=None):
    """Trajectory at ``p = n`` in log form; it must exist on all of ``[0, r_max]``."""
    if spec.p != spec.n:
        raise RegimeError("the borderline demo needs p = n")
    controls = controls or IntegratorControls(value_cap=LOG_CAP)
    seed, state0 = seed_start(spec, a0)
    prof = integrate_log(spec, state0, r_max, controls)
    prof.seed = seed
    prof.handoff = state0[0]
    if prof.status == CAP_REACHED:
        raise InvariantError(f"critical trajectory reached the value cap at r={prof.r_end:.6g}")
    return prof


def homogeneity_gap(spec, a0, lam, r_max, controls=None):
    """Max relative deviation between ``u_{lam a0}`` and ``lam u_{a0}``."""
    base = borderline_demo(spec, a0, r_max, controls)
    scaled = borderline_demo(spec, lam * a0, r_max, controls)
    if base.r.size != scaled.r.size or np.any(base.r != scaled.r):
        raise InvariantError("homogeneous trajectories were sampled on different grids")
    return float(np.max(np.abs(np.expm1(scaled.log_u - base.log_u - np.log(lam)))))


def ordering_check(spec, profile_lo, profile_hi, rel_tol=ORDER_TOL):
    """True iff ``profile_hi >= profile_lo`` on the common radii.

    Both profiles are compared in ``log u`` on the union of their grids
    inside the overlap, with piecewise-linear sampling.
    """
    if profile_lo.spec != spec or profile_hi.spec != spec:
        raise InputError("profiles belong to a different equation")
    lo_r = max(profile_lo.r[0], profile_hi.r[0])
    hi_r = min(profile_lo.r[-1], profile_hi.r[-1])
    if not hi_r > lo_r:
        raise InputError("profiles do not overlap")
    r = np.union1d(profile_lo.r, profile_hi.r)
    r = r[(r >= lo_r) & (r <= hi_r)]
    w_lo = np.interp(r, profile_lo.r, _log_u(profile_lo))
    w_hi = np.interp(r, profile_hi.r, _log_u(profile_hi))
    return bool(np.all(w_hi - w_lo >= np.log1p(-rel_tol)))


def _log_u(profile):
    return profile.log_u if profile.log_u is not None else np.log(profile.u)
