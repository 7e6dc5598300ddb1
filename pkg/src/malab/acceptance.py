"""Acceptance suite: eight criteria, each a function returning a
:class:`CriterionResult` made of named checks at the stated tolerances."""

import filecmp
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import experiments as ex
from .entire import energy_is_monotone, entire_solution
from .large import borderline_demo, central_decay_table, homogeneity_gap, solve_large_on_ball
from .problem import ProblemSpec
from .radial import blowup_radius
from .report import below, holds, rel_close
from .seed import fixed_point_seed
from .verification import exponent_identity_gap, radial_residual


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        tail = "" if self.passed else " | failing: " + ", ".join(c.name for c in self.failures)
        return f"[{status}] criterion {self.number}: {self.title} ({len(self.checks)} checks){tail}"


def criterion_1():
    """Integrator along the exact singular solutions, r in [0.1, 10]."""
    res = CriterionResult(1, "exact-solution oracle")
    for n, p in ((2, 0), (2, 1), (3, 1)):
        err, _ = ex.exact_oracle(ProblemSpec(n, p), 0.1, 10.0)
        res.checks.append(below(f"exact_rel_error[n={n},p={p:g}]", err, 1e-9))
    return res


def criterion_2():
    """Series fixed point on the (n, p, a0) lattice and the a4 = 3/4 oracle."""
    res = CriterionResult(2, "series scheme")
    for n in (2, 3):
        for p in (-1.0, 0.0, 0.5, 1.0):
            for a0 in (0.5, 1.0, 2.0):
                seed = fixed_point_seed(ProblemSpec(n, p), a0)
                res.checks += ex.seed_checks(seed, prefix=f"[n={n},p={p:g},a0={a0:g}] ")
    seed = fixed_point_seed(ProblemSpec(2, 1), 1.0, kappa=3)
    a4 = 24.0 * seed.series.coeffs[4]
    res.checks.append(rel_close("a4[n=2,p=1,a0=1]", a4, 0.75, 1e-12))
    return res


def criterion_3():
    """Entire solutions reach r = 100."""
    res = CriterionResult(3, "entire existence")
    for p in (0.5, 1.0, 1.5):
        for a0 in (0.5, 1.0, 2.0):
            tag = f"[p={p:g},a0={a0:g}]"
            prof = entire_solution(ProblemSpec(2, p), a0, 100.0)
            r, u = prof.r, prof.u
            h = np.diff(r)
            second = np.diff(np.diff(u) / h) / (0.5 * (h[1:] + h[:-1]))
            res.checks += [
                holds(f"completed{tag}", prof.status == "completed" and prof.r_end == 100.0, prof.r_end),
                holds(f"strictly_convex{tag}", bool(np.all(second > 0))),
                below(f"residual{tag}", radial_residual(prof).max_rel, 1e-6),
                holds(f"energy_non_increasing{tag}", energy_is_monotone(prof)),
            ]
    return res


def criterion_4():
    """Large solutions on balls for p > n."""
    res = CriterionResult(4, "nonexistence mechanism p > n")
    for n, p in ((2, 3), (3, 4)):
        spec = ProblemSpec(n, p)
        tag = f"[n={n},p={p:g}]"
        fit = solve_large_on_ball(spec, 1.0)
        res.checks.append(rel_close(f"alpha_fit{tag}", fit.alpha_fit, fit.alpha_target, 0.05))
        base = blowup_radius(spec, 1.0).r_star
        for lam in (2.0, 4.0, 16.0):
            r = blowup_radius(spec, lam).r_star
            res.checks.append(rel_close(f"blowup_scaling{tag}[lambda={lam:g}]", r,
                                        lam ** (-(p - n) / (2 * n)) * base, 0.01))
        table = central_decay_table(spec, [0.5, 1.0, 2.0, 4.0])
        prod = table[:, 2]
        res.checks.append(below(f"scaled_central_spread{tag}", prod.max() / prod.min() - 1.0, 0.01))
        res.checks.append(holds(f"a_star_decreasing{tag}", bool(np.all(np.diff(table[:, 1]) < 0))))
        res.checks.append(below(f"a_star_decay_ratio{tag}", table[-1, 1] / table[0, 1], 1e-2))
    return res


def criterion_5():
    """Critical exponent p = n = 2: no blow-up and exact homogeneity."""
    res = CriterionResult(5, "criticality p = n")
    spec = ProblemSpec(2, 2)
    for a0 in (1.0, 100.0):
        prof = borderline_demo(spec, a0, 50.0)
        res.checks.append(holds(f"completed[a0={a0:g}]", prof.status == "completed" and prof.r_end == 50.0,
                                prof.r_end))
    for lam in (10.0, 100.0):
        res.checks.append(below(f"homogeneity[lambda={lam:g}]", homogeneity_gap(spec, 1.0, lam, 50.0), 1e-8))
    return res


BARRIER_GRID = [(p, b) for p in (0.125, 0.25, 0.375) for b in (-0.5, -1.0, -2.0)]


def criterion_6():
    """Barrier pipeline for every (p, beta) on the grid."""
    res = CriterionResult(6, "barrier pipeline")
    for p, b in BARRIER_GRID:
        run = ex.run_barrier(p, b)
        for c in run.checks:
            c.name = f"{c.name}[p={p:g},beta={b:g}]"
        res.checks += run.checks
    return res


def criterion_7(count=20, seed=20240601):
    """Exponent identity for random (n, p) with p > n."""
    res = CriterionResult(7, "exponent consistency")
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, 9))
        p = float(n + rng.uniform(0.05, 6.0))
        terms = (2.0 * n / (n - p), (n + 1.0) / (p - n), (n - 1.0) / (n - p))
        scale = max(abs(t) for t in terms)
        gap = abs(exponent_identity_gap(n, p)) / scale
        fp = Fraction(p)
        exact = Fraction(2 * n) / (n - fp) + Fraction(n + 1) / (fp - n) - Fraction(n - 1) / (n - fp)
        res.checks.append(below(f"identity_gap[n={n},p={p:.6f}]", gap, 1e-14))
        res.checks.append(holds(f"identity_exact[n={n},p={p:.6f}]", exact == 0))
    return res


DETERMINISM_COMMANDS = [
    ["entire", "--n", "2", "--p", "1", "--a0", "1", "--r-max", "100", "--plot"],
    ["large", "--n", "2", "--p", "3", "--R", "1", "--plot"],
    ["large", "--n", "2", "--p", "2"],
    ["barrier", "--p", "0.25", "--beta", "-1", "--plot"],
    ["verify", "--n", "3", "--p", "1"],
    ["sweep", "entire", "--p", "0.5", "1", "--r-max", "20", "--workers", "2"],
]


def criterion_8(workdir=None):
    """Two runs of every command produce byte-identical CSV/JSON/SVG."""
    from .cli import main

    res = CriterionResult(8, "determinism")
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        tmp = Path(tmp)
        for k, argv in enumerate(DETERMINISM_COMMANDS):
            name = " ".join(argv[:1] + argv[1:5])
            dirs = [tmp / f"cmd{k}_run{j}" for j in (0, 1)]
            codes = [main(argv + ["--out", str(d), "--stem", "out"], quiet=True) for d in dirs]
            files = sorted(f.name for f in dirs[0].iterdir() if not f.name.endswith(".wallclock.json"))
            same = bool(files) and all(filecmp.cmp(dirs[0] / f, dirs[1] / f, shallow=False) for f in files)
            res.checks.append(holds(f"byte_identical[{name}]", same, len(files)))
            res.checks.append(holds(f"exit_zero[{name}]", codes == [0, 0], codes[0]))
    return res


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_suite(only=None, workdir=None):
    results = []
    for k in sorted(only or CRITERIA):
        func = CRITERIA[k]
        results.append(func(workdir) if k == 8 else func())
    return results
