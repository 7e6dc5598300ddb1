from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class ProblemSpec:
    """Equation instance ``det D^2 u = A u^p`` in dimension ``n``."""

    n: int
    p: float
    A: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InputError(f"dimension must be an integer >= 2, got {self.n!r}")
        if not self.A > 0:
            raise InputError(f"coefficient A must be positive, got {self.A!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "A", float(self.A))

    @property
    def regime(self):
        if self.p < self.n:
            return "subcritical"
        if self.p == self.n:
            return "critical"
        return "supercritical"

    @property
    def params(self):
        import numpy as np

        return np.array([float(self.n), self.p, self.A])

    def central_curvature(self, a0):
        """``u''(0)`` forced by the equation at the centre: ``(A a0^p)^(1/n)``."""
        return (self.A * a0**self.p) ** (1.0 / self.n)

    def length_scale(self, a0):
        """Natural radius ``sqrt(a0 / u''(0))`` of the trajectory from ``a0``."""
        return (a0 / self.central_curvature(a0)) ** 0.5

    def blowup_exponent(self):
        """Boundary exponent ``(n + 1)/(p - n)`` of large solutions."""
        return (self.n + 1) / (self.p - self.n)

    def scaling_exponent(self):
        """``2n/(p - n)``: ``u_R(0) R^{2n/(p-n)}`` is R-independent."""
        return 2.0 * self.n / (self.p - self.n)
