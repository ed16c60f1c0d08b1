"""Inequality reports shared by the verifiers."""

import math
from dataclasses import dataclass, field


def encode_value(x):
    """JSON-friendly scalar: infinities become the string ``"inf"``."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    if hasattr(x, "item") and callable(x.item) and getattr(x, "ndim", 1) == 0:
        return encode_value(x.item())
    return x


@dataclass
class BoundReport:
    """One checked instance of ``lhs <= rhs``.

    ``passed`` holds exactly when ``slack = rhs - lhs >= -tolerance``.  An
    infinite right-hand side always passes; an infinite left-hand side
    against a finite right-hand side always fails.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float = 1e-9
    anchor: str = ""
    context: dict = field(default_factory=dict)

    @property
    def slack(self):
        lhs, rhs = float(self.lhs), float(self.rhs)
        if math.isinf(rhs) and rhs > 0:
            return math.inf
        if math.isinf(lhs) and lhs > 0:
            return -math.inf
        return rhs - lhs

    @property
    def passed(self):
        return self.slack >= -self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": encode_value(float(self.lhs)),
            "rhs": encode_value(float(self.rhs)),
            "slack": encode_value(float(self.slack)),
            "pass": bool(self.passed),
            "context": encode_value(dict(self.context, tolerance=self.tolerance)),
        }

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.lhs:.6g} <= {self.rhs:.6g} (slack {self.slack:.3g})"
