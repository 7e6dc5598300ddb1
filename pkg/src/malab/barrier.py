"""Zero-boundary barrier ``u(x, y) = y^alpha phi(e^x y^beta)`` for ``n = 2``,
``0 < p < 1/2``, ``beta < 0`` on the domain ``{e^x y^beta > r0}``.

With ``alpha = 2/(2 - p)`` and ``zeta(phi) = r phi_r`` the equation becomes

    zeta zeta' = (alpha^2 zeta^2 + phi^p) / (alpha (alpha - 1) phi - beta zeta),

and ``phi(r)`` is recovered from ``log(r / r1) = int_{phi1}^{phi} dphi / zeta``.

Near ``phi = 0`` the solution has the form ``zeta = phi^e G(x)`` with
``e = (p + 1)/3``, ``x = phi^t``, ``t = (2 - p)/3`` and ``G`` analytic with
``G(0) = gamma_beta``. In the variable ``x`` both the fixed-point map and the
integral ``int_0 dphi / zeta`` have bounded, smooth integrands, so the seed
is held as a Chebyshev interpolant of ``G`` and integrated by Gauss rules.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.optimize import brentq
from scipy.special import roots_jacobi, roots_legendre

from . import kernels
from .errors import (
    BandViolationError,
    ConvergenceError,
    DomainError,
    InputError,
    InvariantError,
    SingularityError,
    StiffnessError,
)

DEFAULT_Q = 0.9
DEFAULT_DELTA = 1e-3
DEFAULT_PHI_MAX = 1e4
DEFAULT_R1 = 1.0
SEED_DEGREE = 24
QUAD_NODES = 40
SEED_TOL = 1e-14
SEED_MAX_ITER = 5000
MAX_HALVINGS = 6
PHI_PER_DECADE = 200
PARAM_TOL = 1e-14


@dataclass(frozen=True)
class BarrierParams:
    p: float
    beta: float
    q: float = DEFAULT_Q
    delta: float = DEFAULT_DELTA
    r1: float = DEFAULT_R1
    phi1: float = None
    alpha: float = None
    gamma_beta: float = None

    def __post_init__(self):
        p, beta = float(self.p), float(self.beta)
        if not 0 < p < 0.5:
            raise InputError(f"barrier needs p in (0, 1/2), got {self.p!r}")
        if not beta < 0:
            raise InputError(f"barrier needs beta < 0, got {self.beta!r}")
        if not (p + 1) / 3 < self.q < 1:
            raise InputError(f"q must lie in ((p+1)/3, 1), got {self.q!r}")
        if not 0 < self.delta < 1:
            raise InputError("delta must lie in (0, 1)")
        if not self.r1 > 0:
            raise InputError("r1 must be positive")
        phi1 = self.delta if self.phi1 is None else float(self.phi1)
        if not 0 < phi1 <= self.delta:
            raise InputError("phi1 must lie in (0, delta]")
        alpha = 2.0 / (2.0 - p)
        gamma = (3.0 / (abs(beta) * (p + 1.0))) ** (1.0 / 3.0)
        for name, stored, value in (("alpha", self.alpha, alpha), ("gamma_beta", self.gamma_beta, gamma)):
            if stored is not None and abs(stored - value) > PARAM_TOL * abs(value):
                raise InputError(f"stored {name}={stored!r} disagrees with the value {value!r} implied by p, beta")
        for name, value in (("p", p), ("beta", beta), ("q", float(self.q)), ("delta", float(self.delta)),
                            ("r1", float(self.r1)), ("phi1", phi1), ("alpha", alpha), ("gamma_beta", gamma)):
            object.__setattr__(self, name, value)
        if not 2.0 / (abs(beta) * gamma**3) < 1.0:
            raise InputError("band inequality 2(p+1)/3 < 1 fails")

    @property
    def e(self):
        """Small-phi exponent ``(p + 1)/3`` of ``zeta``."""
        return (self.p + 1.0) / 3.0

    @property
    def t(self):
        """Exponent of the analytic variable ``x = phi^((2 - p)/3)``."""
        return (2.0 - self.p) / 3.0

    @property
    def tail_constant(self):
        """``alpha/|beta|``, the limit of ``zeta/phi``."""
        return self.alpha / abs(self.beta)

    @property
    def lower_tail_constant(self):
        """``alpha^2 (2 - p)/(2|beta|)`` from the lower tail bound."""
        return self.alpha**2 * (2.0 - self.p) / (2.0 * abs(self.beta))

    @property
    def A2(self):
        a = self.alpha
        return 2.0 * self.p / (a * (a - 1.0) * (4.0 - self.p**2))

    @property
    def ode_params(self):
        return np.array([self.alpha, self.p, self.beta])

    def with_delta(self, delta):
        return replace(self, delta=delta, phi1=min(self.phi1, delta))


def _h(x, g, params):
    """``zeta' / phi^(e-1)`` for ``zeta = phi^e g`` written in ``x``."""
    a = params.alpha
    return (1.0 + a * a * x * g * g) / (g * (abs(params.beta) * g + a * (a - 1.0) * x))


@dataclass
class ZetaSeed:
    params: BarrierParams
    G: Chebyshev
    iterations: int
    history: list = field(default_factory=list)
    band_margin: float = 0.0
    halvings: int = 0

    @property
    def x_max(self):
        return self.params.delta ** self.params.t

    def zeta(self, phi):
        phi = np.asarray(phi, dtype=float)
        return phi**self.params.e * self.G(phi**self.params.t)

    def dzeta(self, phi):
        """``d zeta / d phi`` from the equation (valid for phi > 0)."""
        phi = np.asarray(phi, dtype=float)
        return phi ** (self.params.e - 1.0) * _h(phi**self.params.t, self.G(phi**self.params.t), self.params)

    def lam_x(self, x):
        """``int_0^phi dphi / zeta`` at ``phi = x^(1/t)``: ``(x/t) int_0^1 dv / G(x v)``."""
        x = np.asarray(x, dtype=float)
        v, w = _legendre01(QUAD_NODES)
        vals = 1.0 / self.G(np.multiply.outer(x, v))
        return x / self.params.t * (vals @ w)

    def lam(self, phi):
        return self.lam_x(np.asarray(phi, dtype=float) ** self.params.t)


def _legendre01(m):
    z, w = roots_legendre(m)
    return 0.5 * (z + 1.0), 0.5 * w


def _jacobi01(m, a):
    """Nodes and weights for ``int_0^1 v^(a-1) f(v) dv``."""
    z, w = roots_jacobi(m, 0.0, a - 1.0)
    return 0.5 * (z + 1.0), w * 2.0**-a


def _band_margin(G, params):
    """``max |zeta - gamma phi^e| / phi^q`` over (0, delta]; must stay <= 1."""
    xs = np.geomspace(params.delta ** params.t * 1e-10, params.delta ** params.t, 400)
    phi = xs ** (1.0 / params.t)
    return float(np.max(np.abs(G(xs) - params.gamma_beta) * phi ** (params.e - params.q)))


def _picard(params, tol, max_iter):
    X = params.delta ** params.t
    nodes = 0.5 * X * (np.polynomial.chebyshev.chebpts1(SEED_DEGREE + 1) + 1.0)
    v, w = _jacobi01(QUAD_NODES, params.e / params.t)
    weight = nodes ** (params.e / params.t)
    G = Chebyshev([params.gamma_beta], domain=[0.0, X])
    history = []
    for it in range(1, max_iter + 1):
        xv = np.multiply.outer(nodes, v)
        vals = _h(xv, G(xv), params) @ w / params.t
        new = Chebyshev.fit(nodes, vals, SEED_DEGREE, domain=[0.0, X])
        # the constant mode of T is expansive (factor -2); the band fixes it at gamma
        new = new + (params.gamma_beta - new(0.0))
        margin = _band_margin(new, params)
        if margin > 1.0:
            raise BandViolationError(f"iterate {it} left the band (margin {margin:.3g}) at delta={params.delta:g}")
        change = float(np.max(weight * np.abs(new(nodes) - G(nodes))))
        history.append(change)
        G = new
        if change < tol:
            return G, it, history, margin
    raise ConvergenceError(f"zeta seed did not converge in {max_iter} sweeps (last change {change:.3e})")


def seed_zeta(params, tol=SEED_TOL, max_iter=SEED_MAX_ITER, max_halvings=MAX_HALVINGS):
    """Fixed point of ``T`` on ``(0, delta]`` started from ``gamma_beta phi^e``.

    ``T`` freezes ``xi`` in ``zeta' = (alpha^2 xi + phi^p / xi)/(alpha(alpha-1)phi - beta xi)``
    and integrates from ``zeta(0) = 0``. A band violation halves ``delta``
    (at most ``max_halvings`` times) before giving up.
    """
    for k in range(max_halvings + 1):
        try:
            G, it, history, margin = _picard(params, tol, max_iter)
        except BandViolationError:
            if k == max_halvings:
                raise
            params = params.with_delta(0.5 * params.delta)
            continue
        return ZetaSeed(params=params, G=G, iterations=it, history=history, band_margin=margin, halvings=k)


@dataclass
class BarrierProfile:
    params: BarrierParams
    seed: ZetaSeed
    phi_grid: np.ndarray
    zeta: np.ndarray
    lam: np.ndarray
    r_of_phi: np.ndarray = None
    r0: float = None
    tail_slope: float = None
    stats: dict = field(default_factory=dict)


def extend_zeta(params, seed, phi_max=DEFAULT_PHI_MAX, rel_tol=1e-12, abs_tol=1e-14):
    """Integrate ``(zeta, int dphi/zeta)`` from ``delta`` to ``phi_max``."""
    params = seed.params
    if not phi_max >= 1e4:
        raise InputError("phi_max must be at least 1e4")
    d = params.delta
    inner = np.geomspace(d * 1e-8, d, 8 * 20 + 1)
    count = int(np.ceil(np.log10(phi_max / d) * PHI_PER_DECADE))
    outer = np.geomspace(d, phi_max, count + 1)[1:]
    outer[-1] = phi_max
    z_d = float(seed.zeta(d))
    l_d = float(seed.lam(d))
    res = kernels.solve(kernels.ZETA, params.ode_params, d, z_d, l_d, outer, 0, np.array([np.inf]),
                        rel_tol, abs_tol, np.inf, 1e-14, 0.0)
    out_t, out_y, n_out, status = res[0], res[1], res[2], res[6]
    if status == kernels.STATUS_UNDERFLOW:
        raise StiffnessError(f"zeta integration stalled near phi={out_t[n_out - 1]:.6g}")
    if status == kernels.STATUS_POSITIVITY or n_out < outer.size:
        raise InvariantError("zeta lost positivity")
    phi = np.concatenate((inner, out_t))
    zeta = np.concatenate((seed.zeta(inner), out_y[:, 0]))
    lam = np.concatenate((seed.lam(inner), out_y[:, 1]))
    prof = BarrierProfile(params=params, seed=seed, phi_grid=phi, zeta=zeta, lam=lam,
                          tail_slope=float(zeta[-1] / phi[-1]),
                          stats={"steps": int(res[7]), "rejected": int(res[8]), "rhs_evaluations": int(res[9]),
                                 "seed_iterations": seed.iterations, "delta_halvings": seed.halvings})
    if not (np.all(zeta > 0) and np.all(np.diff(zeta) > 0)):
        raise InvariantError("zeta is not positive and increasing")
    return prof


def compute_r0(profile, params=None):
    """``r0 = r1 exp(-int_0^{phi1} dphi / zeta)``; also fills ``r_of_phi``."""
    params = profile.params
    lam1 = float(profile.seed.lam(params.phi1))
    if not np.isfinite(lam1) or lam1 <= 0:
        raise SingularityError(f"singular integral evaluated to {lam1!r}")
    r0 = params.r1 * np.exp(-lam1)
    profile.r0 = float(r0)
    profile.r_of_phi = r0 * np.exp(profile.lam)
    return profile.r0


def zeta_upper_bound(profile):
    """Log-margin of ``zeta^2 <= A1 phi^(4/p) - A2 phi^p`` for ``phi >= delta``.

    Returns ``(min margin, first phi where the right side is positive)``;
    a non-negative margin means the bound holds.
    """
    pr = profile.params
    d = pr.delta
    zd = float(profile.seed.zeta(d))
    k = 4.0 / pr.p
    mask = profile.phi_grid >= d
    phi, zeta = profile.phi_grid[mask], profile.zeta[mask]
    # A1 phi^k - A2 phi^p in logs: A1 = d^-k zd^2 + A2 d^(p-k)
    log_a1 = np.logaddexp(-k * np.log(d) + 2 * np.log(zd), np.log(pr.A2) + (pr.p - k) * np.log(d))
    log_first = log_a1 + k * np.log(phi)
    log_second = np.log(pr.A2) + pr.p * np.log(phi)
    positive = log_first > log_second
    if not np.any(positive):
        return -np.inf, np.nan
    log_rhs = log_first[positive] + np.log1p(-np.exp(log_second[positive] - log_first[positive]))
    margin = log_rhs - 2 * np.log(zeta[positive])
    return float(np.min(margin)), float(phi[positive][0])


def recover_phi(profile, r, rel_tol=1e-13, abs_tol=1e-15):
    """``(phi, zeta)`` at radii ``r >= r0`` from ``int_0^phi dphi/zeta = log(r/r0)``.

    Radii whose ``phi`` lies in the seeded region are inverted by root
    finding on the seed integral; the rest come from one outward
    integration of ``(phi, zeta)`` in ``log r``.
    """
    if profile.r0 is None:
        compute_r0(profile)
    pr = profile.params
    r = np.asarray(r, dtype=float)
    if np.any(r < profile.r0):
        raise DomainError(f"radius below r0={profile.r0:.17g}")
    target = np.log(r / profile.r0)
    seed = profile.seed
    X = seed.x_max
    lam_d = float(seed.lam_x(X))
    phi = np.empty_like(r)
    zeta = np.empty_like(r)
    # targets within rounding of the seam stay on the seed side
    inner = target <= lam_d * (1.0 + 1e-13)
    for i in np.flatnonzero(inner):
        g = min(target[i], lam_d)
        x = X if g == lam_d else brentq(lambda s: float(seed.lam_x(s)) - g, 0.0, X, xtol=1e-300, rtol=1e-15)
        phi[i] = x ** (1.0 / pr.t)
    phi[r == pr.r1] = pr.phi1
    zeta[inner] = seed.zeta(phi[inner])
    outer = ~inner
    if np.any(outer):
        s = np.log(r[outer])
        order = np.argsort(s)
        s_sorted = s[order]
        s_start = np.log(profile.r0) + lam_d
        grid, inverse = np.unique(s_sorted, return_inverse=True)
        res = kernels.solve(kernels.PHI_OF_LOGR, pr.ode_params, s_start, pr.delta, float(seed.zeta(pr.delta)),
                            grid, 0, np.array([np.inf]), rel_tol, abs_tol, np.inf, 1e-14, 0.0)
        if res[6] != kernels.STATUS_COMPLETED or res[2] < grid.size:
            raise InvariantError(f"phi recovery stopped with status {res[6]}")
        vals = res[1][inverse]
        back = np.empty_like(order)
        back[order] = np.arange(order.size)
        phi[outer] = vals[back, 0]
        zeta[outer] = vals[back, 1]
    return phi, zeta


def build_barrier(params, phi_max=DEFAULT_PHI_MAX):
    """Seed, extension and ``r0`` in one call."""
    seed = seed_zeta(params)
    prof = extend_zeta(seed.params, seed, phi_max)
    compute_r0(prof)
    return prof


def _radius(params, x, y):
    return np.exp(x) * y**params.beta


def assemble_solution(profile, x, y):
    """Values, gradient and Hessian of ``u = y^alpha phi(e^x y^beta)``.

    Second derivatives use ``r phi_r = zeta`` and
    ``r^2 phi_rr = zeta zeta' - zeta`` with ``zeta zeta'`` from the equation.
    """
    pr = profile.params
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(y <= 0):
        raise DomainError("points need y > 0")
    r = _radius(pr, x, y)
    if profile.r0 is None:
        compute_r0(profile)
    if np.any(r <= profile.r0):
        raise DomainError("points must satisfy e^x y^beta > r0")
    phi, zeta = recover_phi(profile, r.ravel())
    phi, zeta = phi.reshape(r.shape), zeta.reshape(r.shape)
    a, b = pr.alpha, pr.beta
    zz = (a * a * zeta**2 + phi**pr.p) / (a * (a - 1.0) * phi - b * zeta)
    rr = zz - zeta
    ya = y**a
    u = ya * phi
    uxx = ya * (zeta + rr)
    uxy = y ** (a - 1) * ((a + b) * zeta + b * rr)
    uyy = y ** (a - 2) * (a * (a - 1) * phi + b * (2 * a + b - 1) * zeta + b * b * rr)
    return {
        "x": x, "y": y, "r": r, "phi": phi, "zeta": zeta, "u": u,
        "ux": ya * zeta, "uy": y ** (a - 1) * (a * phi + b * zeta),
        "uxx": uxx, "uxy": uxy, "uyy": uyy,
        "det": uxx * uyy - uxy**2, "rhs": u**pr.p,
    }


def evaluate_u(profile, x, y):
    """Barrier values only (one batched phi recovery)."""
    pr = profile.params
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    r = _radius(pr, x, y)
    phi, _ = recover_phi(profile, r.ravel())
    return y**pr.alpha * phi.reshape(r.shape)


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFF = np.arange(-2, 3)


def fd_hessian(profile, x, y, h=2e-3):
    """Fourth-order finite-difference Hessian of the assembled ``u``.

    Uses ``u`` values only (5-point second differences, 5x5 tensor stencil
    for the mixed term); steps are ``h`` in ``x`` and ``h y`` in ``y``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    hx, hy = h, h * y
    X = x[:, None, None] + _OFF[None, :, None] * hx
    Y = y[:, None, None] + _OFF[None, None, :] * hy[:, None, None]
    U = evaluate_u(profile, X, Y)
    uxx = U[:, :, 2] @ _D2 / hx**2
    uyy = U[:, 2, :] @ _D2 / hy**2
    uxy = np.einsum("kij,i,j->k", U, _D1, _D1) / (hx * hy)
    return uxx, uxy, uyy


def sample_points(profile, size=5, y_range=(0.5, 2.0), r_span=(1.5, 4.0)):
    """Interior ``size x size`` grid: ``y`` in ``y_range``, ``r`` from
    ``r_span[0] r0`` to ``r_span[1] r1``."""
    pr = profile.params
    ys = np.linspace(*y_range, size)
    rs = np.geomspace(r_span[0] * profile.r0, r_span[1] * pr.r1, size)
    R, Y = np.meshgrid(rs, ys, indexing="ij")
    X = np.log(R) - pr.beta * np.log(Y)
    return X.ravel(), Y.ravel()


def fd_residual(profile, x, y, h=2e-3):
    """``|det D^2 u - u^p| / u^p`` with the finite-difference Hessian."""
    uxx, uxy, uyy = fd_hessian(profile, x, y, h)
    u = evaluate_u(profile, x, y)
    rhs = u**profile.params.p
    return np.abs(uxx * uyy - uxy**2 - rhs) / rhs


def boundary_approach(profile, ks=range(1, 9), y=1.0):
    """``u`` at ``e^x y^beta = r0 (1 + 10^-k)`` for increasing ``k``."""
    pr = profile.params
    r = profile.r0 * (1.0 + 10.0 ** -np.asarray(list(ks), dtype=float))
    x = np.log(r) - pr.beta * np.log(y)
    return r, evaluate_u(profile, x, np.full_like(x, y))
