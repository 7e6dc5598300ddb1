"""Entire radial solutions for p < n: series seed on [0, delta], then the
radial ODE out to an arbitrary radius."""

import numpy as np

from .errors import InputError, InvariantError, RegimeError
from .radial import (
    CAP_REACHED,
    COMPLETED,
    DEFAULT_SAMPLES_PER_DECADE,
    IntegratorControls,
    RadialProfile,
    integrate,
)
from .seed import fixed_point_seed

OVERFLOW_CAP = 1e300


def _series_grid(delta, per_decade):
    # uniform in r with the spacing the geometric ODE grid has at delta
    ratio = 10.0 ** (1.0 / per_decade) - 1.0
    count = int(np.ceil(1.0 / ratio))
    return np.linspace(0.0, delta, count + 1)


def extend_entire(seed, r_max, controls=None, per_decade=DEFAULT_SAMPLES_PER_DECADE):
    """Continue the seed from ``r = delta`` to ``r_max``.

    The returned profile holds series samples on ``[0, delta]`` followed by
    the ODE samples on a geometric grid with the same spacing. Blow-up before
    ``r_max`` is impossible for ``p < n`` and is reported as an integrator
    fault.
    """
    spec = seed.spec
    if spec.p >= spec.n:
        raise RegimeError("entire continuation needs p < n")
    if not r_max > seed.delta:
        raise InputError("r_max must exceed the handoff radius")
    # blow-up is impossible here, so only floating-point overflow is capped
    controls = controls or IntegratorControls(value_cap=OVERFLOW_CAP)
    rs = _series_grid(seed.delta, per_decade)
    us = seed.series(rs)
    dus = seed.series.eval_deriv(rs)
    state0 = (seed.delta, us[-1], dus[-1])
    ode = integrate(spec, state0, r_max, controls)
    if ode.status == CAP_REACHED:
        return RadialProfile(spec=spec, r=np.concatenate((rs, ode.r[1:])),
                             u=np.concatenate((us, ode.u[1:])),
                             du=np.concatenate((dus, ode.du[1:])),
                             r_end=ode.r_end, status=CAP_REACHED, seed=seed,
                             handoff=seed.delta, stats=ode.stats)
    r = np.concatenate((rs, ode.r[1:]))
    u = np.concatenate((us, ode.u[1:]))
    du = np.concatenate((dus, ode.du[1:]))
    prof = RadialProfile(spec=spec, r=r, u=u, du=du, r_end=float(r[-1]), status=COMPLETED,
                         seed=seed, log_u=np.log(u), handoff=seed.delta, stats=ode.stats)
    return prof


def entire_solution(spec, a0, r_max, controls=None, **seed_kw):
    seed = fixed_point_seed(spec, a0, **seed_kw)
    prof = extend_entire(seed, r_max, controls)
    if prof.status != COMPLETED:
        raise InvariantError(
            f"trajectory hit the value cap at r={prof.r_end:.6g} although p < n; integrator fault")
    return prof


def energy_monitor(profile, r_max=None):
    """``E(r) = u'^(n+1)/(n+1) - A R^(n-1) G(u)`` with ``G' = u^p``.

    ``G(u) = u^(p+1)/(p+1)`` (``log u`` at ``p = -1``). Along a solution on
    ``[delta, R]`` its derivative is ``u' u^p A (r^(n-1) - R^(n-1)) <= 0``.
    Returns ``(r, E)`` restricted to ``r >= delta``.
    """
    spec = profile.spec
    R = profile.r[-1] if r_max is None else r_max
    mask = profile.r >= (profile.handoff or 0.0)
    r, u, du = profile.r[mask], profile.u[mask], profile.du[mask]
    n, p = spec.n, spec.p
    G = np.log(u) if p == -1 else u ** (p + 1) / (p + 1)
    return r, du ** (n + 1) / (n + 1) - spec.A * R ** (n - 1) * G


def energy_is_monotone(profile, rel_slack=1e-8):
    r, E = energy_monitor(profile)
    jumps = np.diff(E)
    return bool(np.all(jumps <= rel_slack * abs(E[0])))


def handoff_check(seed, controls=None):
    """Relative mismatch at ``delta`` between the series and an ODE run that
    starts from the series at ``delta / 2``: a truncation-error self-check."""
    controls = controls or IntegratorControls(rel_tol=1e-12, abs_tol=1e-14)
    half = 0.5 * seed.delta
    u, du = seed.state(half)
    prof = integrate(seed.spec, (half, u, du), seed.delta, controls, r_out=np.array([seed.delta]))
    us, dus = seed.state(seed.delta)
    return max(abs(prof.u[-1] / us - 1.0), abs(prof.du[-1] / dus - 1.0))


def profile_invariants(profile, convex_slack=1e-8):
    """Positivity, monotonicity and sampled convexity of a radial profile."""
    r, u, du = profile.r, profile.u, profile.du
    pos = bool(np.all(u > 0))
    mono = bool(np.all(du >= 0) and np.all(du[r > 0] > 0))
    h1 = np.diff(r)
    slopes = np.diff(u) / h1
    second = np.diff(slopes) / (0.5 * (h1[1:] + h1[:-1]))
    convex = bool(np.all(second >= -convex_slack * np.abs(u[1:-1]) / np.maximum(r[1:-1], 1e-300) ** 2))
    return {"positive": pos, "monotone": mono, "convex": convex}
