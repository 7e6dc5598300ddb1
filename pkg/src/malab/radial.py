"""Radial reduction ``u'' (u'/r)^(n-1) = A u^p`` integrated outward from r0 > 0.

Two formulations share the DP5(4) kernel: the direct one in ``(u, u')`` and
an overflow-safe one in ``w = log u`` where the equation reads
``w'' + w'^2 = A exp((p - n) w) (r / w')^(n-1)``.
"""

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from . import kernels
from .errors import InputError, InvariantError, RegimeError, StiffnessError
from .seed import series_seed

COMPLETED = "completed"
BLOWUP_DETECTED = "blowup_detected"
CAP_REACHED = "cap_reached"

DEFAULT_SAMPLES_PER_DECADE = 1000
BLOWUP_CAPS = (1e6, 1e8, 1e10, 1e12)
BRACKET_REL_WIDTH = 1e-6
MAX_LOG_CAP = 650.0


@dataclass(frozen=True)
class IntegratorControls:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    value_cap: float = 1e12
    min_step: float = 1e-14

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.min_step > 0 and self.max_step > 0):
            raise InputError("integrator tolerances and step bounds must be positive")
        if not self.value_cap > 1:
            raise InputError("value_cap must exceed 1")


@dataclass
class RadialProfile:
    spec: object
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    r_end: float
    status: str
    seed: object = None
    log_u: np.ndarray = None
    handoff: float = None
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return self.r.size

    def at(self, r):
        """Piecewise-linear sample of ``u`` at ``r`` (inside the grid)."""
        return np.interp(r, self.r, self.u)


def default_grid(r0, r_max, per_decade=DEFAULT_SAMPLES_PER_DECADE):
    """Geometric output radii from ``r0`` (exclusive) to ``r_max`` (inclusive)."""
    count = max(int(np.ceil(np.log10(r_max / r0) * per_decade)), 2)
    grid = np.geomspace(r0, r_max, count + 1)[1:]
    grid[-1] = r_max
    return grid


def _run(system, spec, r0, y0, y1, r_out, caps, controls):
    res = kernels.solve(system, spec.params, float(r0), float(y0), float(y1),
                        np.ascontiguousarray(r_out, dtype=float), 0,
                        np.ascontiguousarray(caps, dtype=float),
                        controls.rel_tol, controls.abs_tol, controls.max_step,
                        controls.min_step, 0.0)
    out_t, out_y, n_out, cap_t, cap_y, n_cap, status, n_steps, n_rej, n_rhs = res
    stats = {"steps": int(n_steps), "rejected": int(n_rej), "rhs_evaluations": int(n_rhs)}
    if status == kernels.STATUS_UNDERFLOW:
        raise StiffnessError(f"step size underflow near r={out_t[n_out - 1] if n_out else r0:.6g}")
    if status == kernels.STATUS_POSITIVITY:
        raise InvariantError("state left the positive cone (u > 0, u' > 0)")
    return out_t[:n_out], out_y[:n_out], cap_t, cap_y, n_cap, status, stats


def _check_start(state0, r_max):
    r0, u0, du0 = (float(v) for v in state0)
    if not (r0 > 0 and u0 > 0 and du0 > 0):
        raise InputError("need r0 > 0, u0 > 0 and u'(r0) > 0 (the origin is handled by the series seed)")
    if not r_max > r0:
        raise InputError("r_max must exceed r0")
    return r0, u0, du0


def integrate(spec, state0, r_max, controls=None, r_out=None):
    """Integrate ``(u, u')`` from ``state0 = (r0, u0, du0)`` to ``r_max``.

    Stops early with status ``cap_reached`` once ``u >= value_cap``; the
    crossing radius is located by bisection and appended as the last sample.
    """
    controls = controls or IntegratorControls()
    r0, u0, du0 = _check_start(state0, r_max)
    grid = default_grid(r0, r_max) if r_out is None else _validated_grid(r_out, r0, r_max)
    t, y, cap_t, cap_y, n_cap, status, stats = _run(
        kernels.RADIAL, spec, r0, u0, du0, grid, np.array([controls.value_cap]), controls)
    r = np.concatenate(([r0], t))
    u = np.concatenate(([u0], y[:, 0]))
    du = np.concatenate(([du0], y[:, 1]))
    if status == kernels.STATUS_CAP:
        r = np.append(r, cap_t[0])
        u = np.append(u, cap_y[0, 0])
        du = np.append(du, cap_y[0, 1])
        state = CAP_REACHED
    else:
        state = COMPLETED
    r, u, du = _dedupe(r, u, du)
    return RadialProfile(spec=spec, r=r, u=u, du=du, r_end=float(r[-1]), status=state,
                         log_u=np.log(u), stats=stats)


def integrate_log(spec, state0, r_max, controls=None, r_out=None):
    """Same trajectory in ``w = log u``; the cap is ``w >= log(value_cap)``.

    ``u`` is reported as ``exp(w)`` (``inf`` where that overflows) and ``w``
    itself is kept in ``log_u``.
    """
    controls = controls or IntegratorControls()
    r0, u0, du0 = _check_start(state0, r_max)
    grid = default_grid(r0, r_max) if r_out is None else _validated_grid(r_out, r0, r_max)
    w0, z0 = np.log(u0), du0 / u0
    log_cap = np.log(controls.value_cap)
    t, y, cap_t, cap_y, n_cap, status, stats = _run(
        kernels.RADIAL_LOG, spec, r0, w0, z0, grid, np.array([log_cap]), controls)
    r = np.concatenate(([r0], t))
    w = np.concatenate(([w0], y[:, 0]))
    z = np.concatenate(([z0], y[:, 1]))
    if status == kernels.STATUS_CAP:
        r = np.append(r, cap_t[0])
        w = np.append(w, cap_y[0, 0])
        z = np.append(z, cap_y[0, 1])
        state = CAP_REACHED
    else:
        state = COMPLETED
    r, w, z = _dedupe(r, w, z)
    with np.errstate(over="ignore"):
        u = np.exp(w)
        du = z * u
    return RadialProfile(spec=spec, r=r, u=u, du=du, r_end=float(r[-1]), status=state,
                         log_u=w, stats=stats)


def _validated_grid(r_out, r0, r_max):
    g = np.asarray(r_out, dtype=float)
    g = g[g > r0]
    if g.size == 0 or g[-1] < r_max:
        g = np.append(g, r_max)
    if np.any(np.diff(g) <= 0):
        raise InputError("output radii must be strictly increasing")
    return g


def _dedupe(r, *cols):
    keep = np.concatenate(([True], np.diff(r) > 0))
    return (r[keep],) + tuple(c[keep] for c in cols)


def seed_start(spec, a0, delta=None, kappa=None):
    """Handoff state ``(r, u, u')`` from the series seed.

    The handoff radius is ``delta`` times the natural length scale
    ``sqrt(a0 / u''(0))`` so that the series stays accurate for any ``a0``.
    """
    from .seed import DEFAULT_DELTA

    delta = DEFAULT_DELTA if delta is None else delta
    ell = spec.length_scale(a0)
    seed = series_seed(spec, a0, kappa=kappa, delta=min(delta, 0.5))
    rd = delta * ell
    u, du = seed.state(rd)
    return seed, (rd, u, du)


@dataclass
class BlowupReport:
    spec: object
    a0: float
    r_star: float
    bracket: tuple
    caps_used: list
    cap_radii: list
    extrapolation_residual: float
    low_confidence: bool

    @property
    def width(self):
        return self.bracket[1] - self.bracket[0]


def _extrapolate(cap_r, caps, alpha):
    """Fit ``r(cap) = r* - k1 s - k2 s^2`` with ``s = cap^(-1/alpha)``.

    Returns the least-squares ``r*``, the extrapolants from every subset of
    three caps, and the misfit relative to the extrapolated gap.
    """
    s = np.asarray(caps, dtype=float) ** (-1.0 / alpha)
    X = np.column_stack([np.ones_like(s), s, s * s])
    coef, *_ = np.linalg.lstsq(X, cap_r, rcond=None)
    r_star = coef[0]
    misfit = np.max(np.abs(X @ coef - cap_r)) / max(r_star - cap_r[0], 1e-300)
    extrapolants = [np.linalg.solve(X[list(sub)], cap_r[list(sub)])[0]
                    for sub in combinations(range(s.size), 3)]
    return float(r_star), extrapolants, float(misfit)


def blowup_radius(spec, a0, controls=None, caps=BLOWUP_CAPS, delta=None, max_extra_caps=12):
    """Maximal existence radius of the trajectory with ``u(0) = a0`` (``p > n``).

    Cap-crossing radii of the log formulation are extrapolated with the
    boundary-exponent model. If the extrapolants spread more than
    ``1e-6 r*`` the cap ladder is extended upward (factor 1e4 per rung).
    """
    if not spec.p > spec.n:
        raise RegimeError("finite blow-up radius only for p > n")
    controls = controls or IntegratorControls(rel_tol=1e-12, abs_tol=1e-14)
    alpha = spec.blowup_exponent()
    _, start = seed_start(spec, a0, delta)
    caps = [float(c) for c in caps]
    ladder = caps + [caps[-1] * 1e4 ** (k + 1) for k in range(max_extra_caps)]
    # keep the crossing distance cap^(-1/alpha) resolvable in double precision
    ladder = [c for c in ladder if np.log(c) < min(MAX_LOG_CAP, alpha * np.log(1e10))]
    r0, u0, du0 = start
    res = kernels.solve(kernels.RADIAL_LOG, spec.params, r0, np.log(u0), du0 / u0,
                        np.array([np.inf]), 0, np.log(np.array(ladder)),
                        controls.rel_tol, controls.abs_tol, controls.max_step,
                        controls.min_step, 0.0)
    cap_t, n_cap = res[3], int(res[5])
    if n_cap < len(caps):
        raise InvariantError(f"no blow-up detected (status {res[6]}, {n_cap} caps crossed)")
    ladder = ladder[:n_cap]
    used = len(caps)
    while True:
        sel = slice(used - len(caps), used)
        window_caps = ladder[sel]
        r_star, ext, misfit = _extrapolate(cap_t[sel], window_caps, alpha)
        lo, hi = min(ext + [r_star]), max(ext + [r_star])
        pad = 1e-3 * (hi - lo) + 4e-16 * abs(r_star)
        lo, hi = lo - pad, hi + pad
        if hi - lo < BRACKET_REL_WIDTH * r_star or used == len(ladder):
            break
        used += 1
    return BlowupReport(spec=spec, a0=float(a0), r_star=r_star, bracket=(lo, hi),
                        caps_used=list(window_caps), cap_radii=[float(v) for v in cap_t[sel]],
                        extrapolation_residual=misfit,
                        low_confidence=bool(misfit > 0.05 or hi - lo >= BRACKET_REL_WIDTH * r_star))


def with_controls(controls, **kw):
    return replace(controls or IntegratorControls(), **kw)
