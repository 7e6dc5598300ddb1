import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malab.errors import DegenerateProfileError, DomainError, OrderMismatchError, SingularReciprocalError
from malab.series import (
    TruncatedSeries,
    series_add,
    series_mul,
    series_r_over_deriv,
    series_real_power,
    series_reciprocal,
)


def S(*c):
    return TruncatedSeries(np.array(c, dtype=float))


def test_add_examples():
    assert np.array_equal(series_add(S(1, 1), S(1, -1)).coeffs, [2, 0])
    f = S(1, 2, 3)
    assert np.array_equal(series_add(f, S(0, 0, 0)).coeffs, f.coeffs)
    assert np.array_equal(series_add(S(1, 0, 2), S(0, 3, 0)).coeffs, [1, 3, 2])


def test_order_mismatch():
    with pytest.raises(OrderMismatchError):
        series_add(S(1, 2), S(1, 2, 3))
    with pytest.raises(OrderMismatchError):
        series_mul(S(1, 2), S(1))


def test_mul_examples():
    assert np.array_equal(series_mul(S(1, 1, 0), S(1, -1, 0)).coeffs, [1, 0, -1])
    f = S(0.3, -2, 5)
    assert np.array_equal(series_mul(f, S(1, 0, 0)).coeffs, f.coeffs)
    assert np.array_equal(series_mul(S(1, 1), S(1, 1)).coeffs, [1, 2])


def test_reciprocal_examples():
    assert series_reciprocal(S(2.0)).coeffs[0] == 0.5
    assert np.allclose(series_reciprocal(S(1, 1, 0, 0)).coeffs, [1, -1, 1, -1], atol=0)
    g = series_reciprocal(S(1, 3, 0.5))
    assert g.coeffs[1] == -3.0


def test_reciprocal_leading_relation_derivative_form():
    f = TruncatedSeries.from_derivatives([2.0, 0.7, 1.1, -0.4])
    fbar = series_reciprocal(f).derivatives()
    a = f.derivatives()
    assert fbar[1] == pytest.approx(-a[1] / a[0] ** 2, rel=1e-15)


def test_reciprocal_singular():
    with pytest.raises(SingularReciprocalError):
        series_reciprocal(S(1e-301, 1.0))


def test_real_power_examples():
    assert series_real_power(S(4.0), 0.5).coeffs[0] == 2.0
    assert np.allclose(series_real_power(S(1, 1, 0), 2).coeffs, [1, 2, 1], rtol=0, atol=1e-15)
    assert np.allclose(series_real_power(S(1, 1, 0), 0.5).coeffs, [1, 0.5, -0.125], rtol=0, atol=1e-15)


def test_real_power_domain():
    with pytest.raises(DomainError):
        series_real_power(S(0.0, 1.0), 0.5)
    with pytest.raises(DomainError):
        series_real_power(S(-1.0, 1.0), 2)


def test_r_over_deriv_examples():
    a2 = 3.0
    h = series_r_over_deriv(S(0, 0, a2 / 2, 0))
    assert h.coeffs[0] == pytest.approx(1 / a2, rel=1e-15)
    assert np.all(h.coeffs[1:] == 0)
    # f = r^2/2 + r^4: f'/r = 1 + 4 r^2, so r/f' = 1 - 4 r^2 + 16 r^4 ...
    f = S(0, 0, 0.5, 0, 1.0, 0, 0)
    h = series_r_over_deriv(f)
    oracle = series_reciprocal(S(1, 0, 4, 0, 0, 0))
    assert np.allclose(h.coeffs, oracle.coeffs, rtol=0, atol=1e-14)
    assert h.coeffs[2] == -4.0


def test_r_over_deriv_degenerate():
    with pytest.raises(DegenerateProfileError):
        series_r_over_deriv(S(0, 1e-30, 1, 0))
    with pytest.raises(DegenerateProfileError):
        series_r_over_deriv(S(1, 0, 0, 1))


def test_parity_preserved():
    f = S(1.5, 0, 0.7, 0, -0.2, 0, 0.05)
    for out in (series_real_power(f, 0.37), series_reciprocal(f), series_r_over_deriv(f), series_mul(f, f)):
        assert np.all(out.coeffs[1::2] == 0.0)


def test_truncated_series_invariants():
    with pytest.raises(ValueError):
        TruncatedSeries([1.0, np.nan])
    f = TruncatedSeries.from_derivatives([1.0, 2.0, 6.0])
    assert np.array_equal(f.coeffs, [1.0, 2.0, 3.0])
    assert np.array_equal(f.derivatives(), [1.0, 2.0, 6.0])
    assert f.order == 2


coef = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def series(draw, min_order=0, max_order=20):
    m = draw(st.integers(min_order, max_order))
    c0 = draw(st.floats(0.1, 10.0)) * draw(st.sampled_from([1.0, -1.0]))
    rest = draw(st.lists(coef, min_size=m, max_size=m))
    return TruncatedSeries(np.array([c0] + rest))


@settings(max_examples=200, deadline=None)
@given(series())
def test_reciprocal_inverse(f):
    prod = series_mul(series_reciprocal(f), f).coeffs
    scale = np.max(np.abs(series_reciprocal(f).coeffs)) * np.max(np.abs(f.coeffs))
    target = np.zeros_like(prod)
    target[0] = 1.0
    assert np.all(np.abs(prod - target) <= 1e-12 * max(1.0, scale))


@settings(max_examples=200, deadline=None)
@given(series(max_order=12), st.integers(1, 4))
def test_integer_power_matches_products(f, k):
    f = TruncatedSeries(np.abs(f.coeffs[:1]).tolist() + f.coeffs[1:].tolist())
    direct = series_real_power(f, k).coeffs
    prod = f
    for _ in range(k - 1):
        prod = series_mul(prod, f)
    scale = max(1.0, np.max(np.abs(prod.coeffs)))
    assert np.all(np.abs(direct - prod.coeffs) <= 1e-12 * scale)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 20), st.floats(0.1, 10.0), st.lists(coef, min_size=20, max_size=20))
def test_r_over_deriv_inverse(m, c2, rest):
    c = np.zeros(m + 1)
    c[2] = c2
    c[3:] = rest[: m - 2]
    f = TruncatedSeries(c)
    h = series_r_over_deriv(f)
    # f'/r to the same order as h, treating c_{m+1} as zero
    g = TruncatedSeries(np.concatenate((np.arange(2, m + 1) * c[2:], [0.0])))
    prod = series_mul(h, g).coeffs
    target = np.zeros(m)
    target[0] = 1.0
    scale = max(1.0, np.max(np.abs(h.coeffs)) * np.max(np.abs(g.coeffs)))
    assert np.all(np.abs(prod - target) <= 1e-12 * scale)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.floats(0.5, 10.0), st.lists(coef, min_size=10, max_size=10), st.floats(-3, 3))
def test_even_inputs_give_even_outputs(k, c0, rest, p):
    c = np.zeros(2 * k + 1)
    c[0] = c0
    c[2::2] = rest[:k]
    f = TruncatedSeries(c)
    outs = [series_real_power(f, p), series_reciprocal(f)]
    if abs(c[2]) >= 0.1:
        outs.append(series_r_over_deriv(f))
    for out in outs:
        assert np.all(out.coeffs[1::2] == 0.0)
