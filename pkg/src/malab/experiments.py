"""One function per CLI command. Each returns a :class:`Run` holding the
tables, named checks, residual summaries and deterministic work counters;
writing files is left to the caller."""

from dataclasses import dataclass, field

import numpy as np

from . import barrier as bar
from .entire import energy_is_monotone, entire_solution, handoff_check, profile_invariants
from .large import borderline_demo, homogeneity_gap, solve_large_on_ball
from .problem import ProblemSpec
from .radial import IntegratorControls, blowup_radius, integrate
from .report import at_least, below, holds, not_above, rel_close
from .seed import contraction_factor
from .verification import exact_singular, exponent_identity_gap, radial_residual

SCALING_LAMBDAS = (2.0, 4.0, 16.0)


@dataclass
class Run:
    tables: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)
    plot: object = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def seed_checks(seed, prefix=""):
    spec = seed.spec
    c = seed.series.coeffs
    target_a2 = seed.a0 ** (spec.p / spec.n) * spec.A ** (1.0 / spec.n)
    factor = contraction_factor(spec.n, seed.kappa)
    return [
        rel_close(f"{prefix}a2_central_relation", seed.a2, target_a2, 1e-14),
        holds(f"{prefix}odd_coefficients_zero", bool(np.all(c[1::2] == 0.0))),
        not_above(f"{prefix}contraction_estimate", seed.contraction_estimate, factor, 0.05),
        below(f"{prefix}fixed_point_residual", seed.residual, 1e-13),
    ]


def run_entire(n, p, a0, r_max, A=1.0, kappa=None, delta=0.05):
    spec = ProblemSpec(n, p, A)
    prof = entire_solution(spec, a0, r_max, kappa=kappa, delta=delta)
    res = radial_residual(prof)
    inv = profile_invariants(prof)
    run = Run()
    run.checks = seed_checks(prof.seed) + [
        holds("status_completed", prof.status == "completed", prof.status),
        rel_close("r_end", prof.r_end, r_max, 1e-14),
        holds("positive", inv["positive"]),
        holds("monotone", inv["monotone"]),
        holds("convex", inv["convex"]),
        below("equation_residual", res.max_rel, 1e-6),
        holds("energy_non_increasing", energy_is_monotone(prof)),
        below("handoff_truncation_check", handoff_check(prof.seed), 1e-9),
    ]
    run.residuals = {"radial": vars(res)}
    run.counters = dict(prof.stats, picard_sweeps=prof.seed.iterations, samples=int(prof.r.size))
    run.tables["profile"] = (("r", "u", "du"), np.column_stack((prof.r, prof.u, prof.du)))

    def plot(ax):
        keep = prof.r > 0
        ax.loglog(prof.r[keep], prof.u[keep] - prof.u[0], label="u(r) - u(0)")
        ax.set_xlabel("r")
        ax.set_ylabel("u - a0")
        ax.legend()

    run.plot = plot
    return run


def run_large(n, p, radii, A=1.0):
    spec = ProblemSpec(n, p, A)
    if spec.p == spec.n:
        return _run_borderline(spec)
    radii = sorted(float(R) for R in radii)
    fits = [solve_large_on_ball(spec, R) for R in radii]
    run = Run()
    for f in fits:
        tag = f"R={f.R:g}"
        run.checks += [
            rel_close(f"alpha_fit[{tag}]", f.alpha_fit, f.alpha_target, 0.05),
            at_least(f"fit_r2[{tag}]", f.fit_r2, 0.999),
            below(f"a_star_bracket_rel_width[{tag}]", f.bracket_width / f.a_star, 1e-8),
            below(f"blowup_radius_mismatch[{tag}]", abs(f.r_star - f.R) / f.R, 1e-8),
        ]
    k = spec.scaling_exponent()
    products = np.array([f.a_star * f.R**k for f in fits])
    if len(fits) > 1:
        spread = products.max() / products.min() - 1.0
        run.checks.append(below("scaled_central_value_spread", spread, 0.01))
        a = np.array([f.a_star for f in fits])
        run.checks.append(holds("a_star_decreasing", bool(np.all(np.diff(a) < 0))))
    base = blowup_radius(spec, 1.0)
    ladder = [base.r_star]
    for lam in SCALING_LAMBDAS:
        b = blowup_radius(spec, lam)
        ladder.append(b.r_star)
        run.checks.append(rel_close(f"blowup_scaling[lambda={lam:g}]", b.r_star,
                                    lam ** (-(spec.p - spec.n) / (2 * spec.n)) * base.r_star, 0.01))
    run.checks.append(holds("blowup_radius_decreasing", bool(np.all(np.diff(ladder) < 0))))
    run.checks.append(below("exponent_identity_gap", abs(exponent_identity_gap(spec.n, spec.p)), 1e-14))
    run.residuals = {"fit": [{"R": f.R, "alpha_fit": f.alpha_fit, "alpha_target": f.alpha_target,
                              "r2": f.fit_r2, "window": list(f.fit_window)} for f in fits]}
    run.counters = {"bisection_steps": [f.bisection_steps for f in fits],
                    "profile_steps": [f.profile.stats.get("steps", 0) for f in fits]}
    run.tables["table"] = (("R", "a_star", "a_star_scaled", "r_star", "alpha_fit", "alpha_target", "fit_r2"),
                           np.array([[f.R, f.a_star, pr, f.r_star, f.alpha_fit, f.alpha_target, f.fit_r2]
                                     for f, pr in zip(fits, products)]))
    first = fits[0]
    prof = first.profile
    run.tables["profile"] = (("r", "log_u", "dlog_u"), np.column_stack((prof.r, prof.log_u, prof.du / prof.u)))

    def plot(ax):
        for f in fits:
            d = f.R - f.profile.r
            keep = d > 0
            ax.loglog(d[keep] / f.R, f.profile.u[keep], label=f"R={f.R:g}, alpha={f.alpha_fit:.4f}")
        ax.set_xlabel("(R - r)/R")
        ax.set_ylabel("u")
        ax.legend()

    run.plot = plot
    return run


def _run_borderline(spec, a0=1.0, r_max=50.0, lam=10.0):
    prof = borderline_demo(spec, a0, r_max)
    gap = homogeneity_gap(spec, a0, lam, r_max)
    run = Run()
    run.checks = [
        holds("status_completed", prof.status == "completed", prof.status),
        rel_close("r_end", prof.r_end, r_max, 1e-14),
        below(f"homogeneity_gap[lambda={lam:g}]", gap, 1e-8),
    ]
    run.counters = dict(prof.stats)
    run.tables["profile"] = (("r", "log_u", "dlog_u"), np.column_stack((prof.r, prof.log_u, prof.du / prof.u)))

    def plot(ax):
        ax.semilogy(prof.r, prof.log_u)
        ax.set_xlabel("r")
        ax.set_ylabel("log u")

    run.plot = plot
    return run


def run_barrier(p, beta, phi_max=1e4, q=0.9, delta=1e-3, r1=1.0, phi1=None, fd_step=2e-3):
    params = bar.BarrierParams(p, beta, q=q, delta=delta, r1=r1, phi1=phi1)
    prof = bar.build_barrier(params, phi_max)
    pr = prof.params
    run = Run()
    margin, first_phi = bar.zeta_upper_bound(prof)
    phi_r0, _ = bar.recover_phi(prof, [prof.r0])
    x, y = bar.sample_points(prof)
    A = bar.assemble_solution(prof, x, y)
    fd = bar.fd_residual(prof, x, y, fd_step)
    uxx, uxy, uyy = bar.fd_hessian(prof, x, y, fd_step)
    det_fd = uxx * uyy - uxy**2
    rb, ub = bar.boundary_approach(prof)
    run.checks = [
        below("band_margin", prof.seed.band_margin, 1.0 + 1e-12),
        holds("zeta_positive_increasing", bool(np.all(prof.zeta > 0) and np.all(np.diff(prof.zeta) > 0))),
        rel_close("tail_slope", prof.tail_slope, pr.tail_constant, 0.02),
        at_least("upper_bound_log_margin", margin, -1e-9),
        rel_close("lower_tail_constant", pr.lower_tail_constant, pr.tail_constant, 1e-14),
        holds("r0_inside", 0.0 < prof.r0 < pr.r1, prof.r0),
        below("phi_at_r0", abs(float(phi_r0[0])), 1e-10),
        below("fd_residual", float(np.max(fd)), 1e-5),
        below("formula_residual", float(np.max(np.abs(A["det"] - A["rhs"]) / A["rhs"])), 1e-8),
        holds("hessian_psd", bool(np.all(A["uxx"] > 0) and np.all(A["det"] >= -1e-8 * A["rhs"])
                                  and np.all(uxx > 0) and np.all(det_fd >= -1e-8 * A["rhs"]))),
        holds("boundary_value_decreasing", bool(np.all(np.diff(ub) < 0) and ub[-1] < 1e-10), float(ub[-1])),
    ]
    run.residuals = {"fd_residual_max": float(np.max(fd)), "fd_step": fd_step,
                     "upper_bound_first_positive_phi": first_phi,
                     "delta_used": pr.delta, "r0": prof.r0, "tail_slope": prof.tail_slope,
                     "tail_target": pr.tail_constant, "gamma_beta": pr.gamma_beta, "alpha": pr.alpha}
    run.counters = dict(prof.stats)
    run.tables["profile"] = (("phi", "zeta", "r"), np.column_stack((prof.phi_grid, prof.zeta, prof.r_of_phi)))
    run.tables["samples"] = (("x", "y", "r", "u", "uxx", "uxy", "uyy", "det", "u_pow_p", "fd_residual"),
                             np.column_stack((A["x"], A["y"], A["r"], A["u"], A["uxx"], A["uxy"], A["uyy"],
                                              A["det"], A["rhs"], fd)))

    def plot(ax):
        ax.loglog(prof.phi_grid, prof.zeta / prof.phi_grid, label="zeta/phi")
        ax.axhline(pr.tail_constant, color="k", lw=0.8, ls="--", label="alpha/|beta|")
        ax.set_xlabel("phi")
        ax.legend()

    run.plot = plot
    return run


def exact_oracle(spec, r0=0.1, r1=10.0, controls=None):
    """Max relative error of the integrator along ``beta r^alpha`` on ``[r0, r1]``."""
    alpha, beta = exact_singular(spec)
    state = (r0, beta * r0**alpha, alpha * beta * r0 ** (alpha - 1.0))
    prof = integrate(spec, state, r1, controls or IntegratorControls())
    exact = beta * prof.r**alpha
    return float(np.max(np.abs(prof.u / exact - 1.0))), prof


def run_verify(n, p, A=1.0, r0=0.1, r1=10.0):
    spec = ProblemSpec(n, p, A)
    run = Run()
    if spec.p < spec.n:
        alpha, beta = exact_singular(spec)
        err, prof = exact_oracle(spec, r0, r1)
        rr = np.geomspace(r0, r1, 2001)
        from .radial import RadialProfile

        analytic = RadialProfile(spec=spec, r=rr, u=beta * rr**alpha, du=alpha * beta * rr ** (alpha - 1),
                                 r_end=r1, status="completed")
        res_num = radial_residual(prof)
        res_exact = radial_residual(analytic)
        run.checks = [
            below("exact_solution_rel_error", err, 1e-9),
            rel_close("prefactor_identity", beta ** (spec.n - spec.p) * alpha**spec.n * (alpha - 1) / spec.A, 1.0, 1e-12),
            below("residual_analytic_samples", res_exact.max_rel, 1e-9),
            below("residual_integrated", res_num.max_rel, 1e-5),
        ]
        run.residuals = {"integrated": vars(res_num), "analytic": vars(res_exact)}
        run.counters = dict(prof.stats)
        run.tables["profile"] = (("r", "u", "u_exact"), np.column_stack((prof.r, prof.u, beta * prof.r**alpha)))

        def plot(ax):
            ax.loglog(prof.r, np.abs(prof.u / (beta * prof.r**alpha) - 1.0) + 1e-17)
            ax.set_xlabel("r")
            ax.set_ylabel("relative error")

        run.plot = plot
        return run
    if spec.p == spec.n:
        return _run_borderline(spec)
    gap = exponent_identity_gap(spec.n, spec.p)
    a0s = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    radii = np.array([blowup_radius(spec, a).r_star for a in a0s])
    run.checks = [
        below("exponent_identity_gap", abs(gap), 1e-14),
        holds("blowup_radius_decreasing", bool(np.all(np.diff(radii) < 0))),
    ]
    ref = radii[2]
    for a, r in zip(a0s, radii):
        if a != 1.0:
            run.checks.append(rel_close(f"blowup_scaling[lambda={a:g}]", r,
                                        a ** (-(spec.p - spec.n) / (2 * spec.n)) * ref, 0.01))
    run.tables["ladder"] = (("a0", "r_star"), np.column_stack((a0s, radii)))

    def plot(ax):
        ax.loglog(a0s, radii, "o-")
        ax.set_xlabel("a0")
        ax.set_ylabel("r_star")

    run.plot = plot
    return run
