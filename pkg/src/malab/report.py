"""Named pass/fail checks shared by the CLI and the acceptance suite."""

import math
from dataclasses import dataclass


@dataclass
class Check:
    name: str
    value: object
    target: object
    tolerance: object
    passed: bool

    def as_dict(self):
        return {"name": self.name, "value": clean(self.value), "target": clean(self.target),
                "tolerance": clean(self.tolerance), "pass": bool(self.passed)}

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: value={_fmt(self.value)} target={_fmt(self.target)} tol={_fmt(self.tolerance)}"


def clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if hasattr(v, "item") and not isinstance(v, (list, tuple, dict)):
        try:
            v = v.item()
        except (TypeError, ValueError):
            v = v.tolist()
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, dict):
        return {str(k): clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [clean(x) for x in v]
    if hasattr(v, "tolist"):
        return clean(v.tolist())
    return str(v)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def rel_close(name, value, target, rtol):
    value, target = float(value), float(target)
    err = abs(value - target) / abs(target) if target else abs(value)
    return Check(name, value, target, rtol, bool(err <= rtol))


def below(name, value, bound):
    """``value < bound``; the bound is reported as the tolerance."""
    value = float(value)
    return Check(name, value, 0.0, bound, bool(value < bound))


def not_above(name, value, target, slack):
    """``value <= target + slack``."""
    value, target = float(value), float(target)
    return Check(name, value, target, slack, bool(value <= target + slack))


def at_least(name, value, bound):
    value = float(value)
    return Check(name, value, bound, 0.0, bool(value >= bound))


def holds(name, ok, value=None):
    ok = bool(ok)
    return Check(name, ok if value is None else value, True, 0.0, ok)
