import numpy as np
import pytest

from malab.errors import InputError, RegimeError
from malab.problem import ProblemSpec
from malab.radial import (
    IntegratorControls,
    blowup_radius,
    integrate,
    integrate_log,
    seed_start,
)
from malab.verification import exact_singular

# computed once with rel_tol = 1e-12 and pinned
R1_N2_P3 = 3.2728922916853844


def test_controls_validation():
    with pytest.raises(InputError):
        IntegratorControls(rel_tol=0)
    with pytest.raises(InputError):
        IntegratorControls(value_cap=1.0)


def test_exact_singular_n2_p1():
    prof = integrate(ProblemSpec(2, 1), (1.0, 1 / 48, 4 / 48), 4.0)
    assert prof.status == "completed"
    assert prof.u[-1] == pytest.approx(16 / 3, rel=1e-10)
    assert np.all(np.diff(prof.u) > 0) and np.all(np.diff(prof.du) > 0)


def test_closed_form_p0():
    prof = integrate(ProblemSpec(2, 0), (1.0, 1.5, 1.0), 10.0)
    assert np.max(np.abs(prof.u / (1 + prof.r**2 / 2) - 1)) < 1e-10


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (2, 0)])
def test_exact_solution_reproduced(n, p):
    spec = ProblemSpec(n, p)
    a, b = exact_singular(spec)
    prof = integrate(spec, (0.1, b * 0.1**a, a * b * 0.1 ** (a - 1)), 10.0)
    assert np.max(np.abs(prof.u / (b * prof.r**a) - 1)) < 1e-9


def test_supercritical_reaches_cap():
    spec = ProblemSpec(2, 3)
    _, state = seed_start(spec, 1.0)
    prof = integrate(spec, state, 100.0)
    assert prof.status == "cap_reached"
    assert 1e12 <= prof.u[-1] < 1.01e12
    assert prof.r_end < R1_N2_P3


def test_precondition_violations():
    spec = ProblemSpec(2, 1)
    with pytest.raises(InputError):
        integrate(spec, (0.0, 1.0, 0.0), 1.0)
    with pytest.raises(InputError):
        integrate(spec, (1.0, 1.0, 1.0), 0.5)


def test_log_form_agrees():
    spec = ProblemSpec(2, 1)
    _, state = seed_start(spec, 1.0)
    grid = np.geomspace(state[0], 20.0, 500)[1:]
    a = integrate(spec, state, 20.0, r_out=grid)
    b = integrate_log(spec, state, 20.0, r_out=grid)
    assert np.array_equal(a.r, b.r)
    assert np.max(np.abs(a.u / b.u - 1)) < 1e-8


def test_log_form_cap_crossing_agrees():
    spec = ProblemSpec(2, 3)
    _, state = seed_start(spec, 1.0)
    a = integrate(spec, state, 100.0)
    b = integrate_log(spec, state, 100.0)
    assert b.status == "cap_reached"
    assert b.r_end == pytest.approx(a.r_end, rel=1e-8)


def test_blowup_regression_constant():
    rep = blowup_radius(ProblemSpec(2, 3), 1.0)
    assert rep.r_star == pytest.approx(R1_N2_P3, rel=1e-8)
    lo, hi = rep.bracket
    assert lo < rep.r_star < hi
    assert hi - lo < 1e-6 * rep.r_star
    assert not rep.low_confidence
    assert rep.extrapolation_residual < 0.05


@pytest.mark.parametrize("n,p", [(2, 3), (3, 4)])
@pytest.mark.parametrize("lam", [2.0, 4.0, 16.0])
def test_blowup_scaling_law(n, p, lam):
    spec = ProblemSpec(n, p)
    base = blowup_radius(spec, 1.0).r_star
    scaled = blowup_radius(spec, lam).r_star
    assert scaled == pytest.approx(lam ** (-(p - n) / (2 * n)) * base, rel=0.01)


def test_blowup_a0_16_halves_radius():
    assert blowup_radius(ProblemSpec(2, 3), 16.0).r_star == pytest.approx(0.5 * R1_N2_P3, rel=0.005)


def test_larger_p_blows_up_earlier():
    assert blowup_radius(ProblemSpec(2, 2.5), 1.0).r_star > blowup_radius(ProblemSpec(2, 3), 1.0).r_star


def test_blowup_decreasing_ladder():
    spec = ProblemSpec(2, 3)
    radii = [blowup_radius(spec, a).r_star for a in (0.25, 0.5, 1, 2, 4)]
    assert np.all(np.diff(radii) < 0)


def test_blowup_regime():
    with pytest.raises(RegimeError):
        blowup_radius(ProblemSpec(2, 2), 1.0)
