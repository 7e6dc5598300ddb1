import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from malab.barrier import (
    BarrierParams,
    assemble_solution,
    boundary_approach,
    build_barrier,
    fd_residual,
    zeta_upper_bound,
    recover_phi,
    sample_points,
    seed_zeta,
)
from malab.errors import DomainError, InputError


@pytest.fixture(scope="module")
def prof():
    return build_barrier(BarrierParams(0.25, -1.0))


def _rhs(params):
    a, b, p = params.alpha, params.beta, params.p

    def f(s, z):
        phi = np.exp(s)
        return phi * (a * a * z**2 + phi**p) / (z * (a * (a - 1) * phi - b * z))
    return f


@pytest.mark.parametrize("beta,gamma", [(-1.0, 1.338865900164339), (-2.0, 1.0626585691826111)])
def test_gamma_beta(beta, gamma):
    assert BarrierParams(0.25, beta).gamma_beta == pytest.approx(gamma, rel=1e-14)


def test_constants_p_quarter():
    pr = BarrierParams(0.25, -1.0)
    assert pr.alpha == pytest.approx(8 / 7, rel=1e-15)
    assert pr.A2 == pytest.approx(7 / 9, rel=1e-14)
    assert pr.tail_constant == pytest.approx(8 / 7, rel=1e-15)
    assert pr.lower_tail_constant == pytest.approx(8 / 7, rel=1e-14)


@pytest.mark.parametrize("kwargs", [
    dict(p=0.5, beta=-1.0), dict(p=0.0, beta=-1.0), dict(p=0.25, beta=0.5),
    dict(p=0.25, beta=-1.0, q=0.3), dict(p=0.25, beta=-1.0, delta=1.5),
    dict(p=0.25, beta=-1.0, phi1=0.01), dict(p=0.25, beta=-1.0, r1=0.0),
    dict(p=0.25, beta=-1.0, alpha=1.2), dict(p=0.25, beta=-1.0, gamma_beta=1.0),
])
def test_params_validation(kwargs):
    with pytest.raises(InputError):
        BarrierParams(**kwargs)


def test_seed_leading_coefficient(prof):
    seed, pr = prof.seed, prof.params
    gaps = [abs(float(seed.zeta(10.0**-k)) / 10.0 ** (-k * pr.e) - pr.gamma_beta) for k in range(3, 12)]
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-6


def test_seed_band(prof):
    seed, pr = prof.seed, prof.params
    phi = pr.delta / 2
    assert abs(float(seed.zeta(phi)) - pr.gamma_beta * phi**pr.e) <= phi**pr.q
    assert seed.band_margin <= 1.0
    assert seed.history[-1] < 1e-14


def test_seed_against_independent_ode(prof):
    pr, seed = prof.params, prof.seed
    phi0 = 1e-14
    sol = solve_ivp(_rhs(pr), (np.log(phi0), np.log(pr.delta)), [pr.gamma_beta * phi0**pr.e],
                    method="LSODA", rtol=1e-12, atol=1e-30, dense_output=True)
    phis = np.array([1e-8, 1e-5, pr.delta])
    assert np.max(np.abs(sol.sol(np.log(phis))[0] / seed.zeta(phis) - 1)) < 1e-9


def test_extension_against_independent_ode(prof):
    pr = prof.params
    mask = prof.phi_grid >= pr.delta
    sol = solve_ivp(_rhs(pr), (np.log(pr.delta), np.log(prof.phi_grid[-1])), [prof.zeta[mask][0]],
                    method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    assert np.max(np.abs(sol.sol(np.log(prof.phi_grid[mask]))[0] / prof.zeta[mask] - 1)) < 1e-9


def test_zeta_positive_increasing_and_tail(prof):
    assert np.all(prof.zeta > 0) and np.all(np.diff(prof.zeta) > 0)
    assert prof.tail_slope == pytest.approx(prof.params.tail_constant, rel=0.02)


def test_zeta_upper_bound(prof):
    margin, first = zeta_upper_bound(prof)
    assert margin >= -1e-9
    assert first == prof.params.delta


def test_r0_against_weighted_quadrature(prof):
    pr = prof.params
    val, _ = quad(lambda ph: 1.0 / prof.seed.G(ph**pr.t), 0.0, pr.phi1,
                  weight="alg", wvar=(-pr.e, 0.0), epsabs=0.0, epsrel=1e-13)
    assert pr.r1 * np.exp(-val) == pytest.approx(prof.r0, rel=1e-12)
    assert 0 < prof.r0 < pr.r1


def test_r0_independent_of_normalisation():
    base = build_barrier(BarrierParams(0.25, -1.0, phi1=2.5e-4))
    r_half = base.r0 * np.exp(float(base.seed.lam(5e-4)))
    other = build_barrier(BarrierParams(0.25, -1.0, phi1=5e-4, r1=r_half))
    assert other.r0 == pytest.approx(base.r0, rel=1e-6)


def test_recover_phi_endpoints(prof):
    pr = prof.params
    phi, _ = recover_phi(prof, np.array([prof.r0, pr.r1]))
    assert phi[0] < 1e-10
    assert phi[1] == pr.phi1
    with pytest.raises(DomainError):
        recover_phi(prof, np.array([0.5 * prof.r0]))


def test_recover_phi_inverts_profile(prof):
    idx = np.linspace(10, prof.phi_grid.size - 1, 12).astype(int)
    phi, _ = recover_phi(prof, prof.r_of_phi[idx])
    assert np.max(np.abs(phi / prof.phi_grid[idx] - 1)) < 1e-8


def test_power_growth_of_phi(prof):
    phi, _ = recover_phi(prof, np.array([1e2, 1e3, 1e4, 1e5]))
    slopes = np.log10(phi[1:] / phi[:-1])
    assert np.all(np.diff(np.abs(slopes - 8 / 7)) < 0)
    assert slopes[-1] == pytest.approx(8 / 7, rel=1e-3)


def test_boundary_decay(prof):
    _, u = boundary_approach(prof)
    assert np.all(np.diff(u) < 0)
    assert u[-1] < 1e-4


def test_hessian_formula_and_fd(prof):
    x, y = sample_points(prof)
    sol = assemble_solution(prof, x, y)
    assert np.max(np.abs(sol["det"] - sol["rhs"]) / sol["rhs"]) < 1e-8
    assert np.all(sol["uxx"] > 0) and np.all(sol["det"] > 0)
    assert np.max(fd_residual(prof, x, y)) < 1e-5


def test_domain_errors(prof):
    with pytest.raises(DomainError):
        assemble_solution(prof, 0.0, -1.0)
    with pytest.raises(DomainError):
        assemble_solution(prof, np.log(0.5 * prof.r0), 1.0)


def test_delta_halving_for_weak_beta():
    seed = seed_zeta(BarrierParams(0.125, -0.5))
    assert seed.halvings >= 1
    assert seed.params.delta < 1e-3
    assert seed.band_margin <= 1.0
