import numpy as np
import pytest

from malab.errors import ContractionError, InputError, RegimeError
from malab.problem import ProblemSpec
from malab.seed import contraction_factor, fixed_point_seed, picard_map, series_seed


def test_contraction_factor_values():
    assert contraction_factor(2, 2) == pytest.approx(1 / 3)
    assert contraction_factor(3, 2) == pytest.approx(2 / 3)
    assert contraction_factor(2, 1) == 1.0
    with pytest.raises(InputError):
        contraction_factor(2, 0)


def test_hand_derived_coefficients_n2_p1():
    # u'' u' / r = u: matching orders gives a2 = 1, a4 = 3/4
    seed = fixed_point_seed(ProblemSpec(2, 1), 1.0, kappa=3)
    a = seed.series.derivatives()
    assert a[2] == pytest.approx(1.0, rel=1e-14)
    assert a[4] == pytest.approx(0.75, rel=1e-12)
    assert np.all(seed.series.coeffs[1::2] == 0.0)


def test_a2_relation_a0_4():
    seed = fixed_point_seed(ProblemSpec(2, 1), 4.0)
    assert seed.a2 == pytest.approx(2.0, rel=1e-14)


def test_exact_local_solution_p0():
    seed = fixed_point_seed(ProblemSpec(2, 0), 1.0, kappa=2)
    assert np.allclose(seed.series.coeffs, [1.0, 0.0, 0.5, 0.0, 0.0], rtol=0, atol=1e-15)


def test_kappa_one_rejected():
    with pytest.raises(ContractionError):
        fixed_point_seed(ProblemSpec(2, 1), 1.0, kappa=1)


def test_regime_and_input_errors():
    with pytest.raises(RegimeError):
        fixed_point_seed(ProblemSpec(2, 2), 1.0)
    with pytest.raises(InputError):
        fixed_point_seed(ProblemSpec(2, 1), -1.0)
    # the local seed itself has no regime restriction
    assert series_seed(ProblemSpec(2, 3), 1.0).residual < 1e-13


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [-1.0, 0.0, 0.5, 1.0, None])
@pytest.mark.parametrize("a0", [0.5, 1.0, 2.0])
def test_lattice_invariants(n, p, a0):
    p = n - 0.5 if p is None else p
    spec = ProblemSpec(n, p)
    seed = fixed_point_seed(spec, a0)
    assert seed.a2 == pytest.approx(a0 ** (p / n), rel=1e-14)
    assert np.all(seed.series.coeffs[1::2] == 0.0)
    assert seed.contraction_estimate <= contraction_factor(n, seed.kappa) + 0.05
    # feeding the fixed point back reproduces it
    again = picard_map(seed.series, spec).coeffs
    scale = a0 / spec.length_scale(a0) ** np.arange(again.size)
    assert np.max(np.abs(again - seed.series.coeffs) / scale) < 1e-13


def test_contraction_estimate_tracks_theory():
    # the measured Lipschitz ratio sits at the theoretical factor, not far below it
    for n, kappa in ((2, 3), (3, 3), (4, 4)):
        seed = fixed_point_seed(ProblemSpec(n, 0.5), 1.0, kappa=kappa)
        f = contraction_factor(n, kappa)
        assert f - 0.05 <= seed.contraction_estimate <= f + 0.05


def test_plain_picard_contracts_at_stated_rate():
    # independent check: iterate T itself (no relaxation) and watch the top coefficient
    spec = ProblemSpec(2, 1)
    seed = fixed_point_seed(spec, 1.0, kappa=3)
    phi = seed.series
    bumped = phi.coeffs.copy()
    bumped[6] += 1e-6
    from malab.series import TruncatedSeries

    out = picard_map(TruncatedSeries(bumped), spec).coeffs
    ratio = abs(out[6] - phi.coeffs[6]) / 1e-6
    assert ratio == pytest.approx(contraction_factor(2, 3), rel=1e-6)
