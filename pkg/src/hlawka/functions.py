"""Semi-admissible test functions, i.e. |f(x)| <= b / (1 + |x|)^(m + delta).

Each function is radial and is evaluated on the squared norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import unit_ball_volume


@dataclass(frozen=True)
class BallIndicator:
    r: float

    support_radius = property(lambda self: self.r)

    def value_sq(self, norm_sq: float) -> float:
        return 1.0 if norm_sq <= self.r * self.r else 0.0

    def integral(self, m: int) -> float:
        return unit_ball_volume(m) * self.r**m

    def decay_constants(self, m: int, delta: float = 1.0) -> tuple[float, float]:
        return (1 + self.r) ** (m + delta), delta


@dataclass(frozen=True)
class Gaussian:
    tau: float

    support_radius = None

    def value_sq(self, norm_sq: float) -> float:
        return math.exp(-self.tau * norm_sq)

    def integral(self, m: int) -> float:
        return (math.pi / self.tau) ** (m / 2)

    def decay_constants(self, m: int, delta: float = 1.0) -> tuple[float, float]:
        # sup of (1+x)^(m+delta) exp(-tau x^2) sits at 2 tau x (1+x) = m + delta
        e = m + delta
        x = (-1 + math.sqrt(1 + 2 * e / self.tau)) / 2
        return (1 + x) ** e * math.exp(-self.tau * x * x), delta


@dataclass(frozen=True)
class RogersStepLog:
    """Flat at 1/n up to r e^{(1-t)/(tn)}, then 1/(nt) - log(|y|/r) down to 0 at r e^{1/(tn)}.

    Lives on R^{nt}; n is the field degree and t the module rank.
    """

    r: float
    t: int
    n: int

    @property
    def dim(self) -> int:
        return self.n * self.t

    @property
    def inner_radius(self) -> float:
        return self.r * math.exp((1 - self.t) / self.dim)

    @property
    def support_radius(self) -> float:
        return self.r * math.exp(1 / self.dim)

    def value_sq(self, norm_sq: float) -> float:
        rho = math.sqrt(norm_sq)
        if rho <= self.inner_radius:
            return 1.0 / self.n
        if rho <= self.support_radius:
            return max(0.0, 1.0 / self.dim - math.log(rho / self.r))
        return 0.0

    def integral(self, m: int | None = None) -> float:
        m = self.dim if m is None else m
        if m != self.dim:
            raise ValueError(f"RogersStepLog lives in dimension {self.dim}, not {m}")
        return math.e * (1 - math.exp(-self.t)) * self.r**m * unit_ball_volume(m) / m

    def decay_constants(self, m: int, delta: float = 1.0) -> tuple[float, float]:
        return (1 + self.support_radius) ** (m + delta) / self.n, delta

    @classmethod
    def for_integral(cls, target: float, t: int, n: int) -> "RogersStepLog":
        """Choose r so that the integral over R^{nt} equals target."""
        m = n * t
        unit = math.e * (1 - math.exp(-t)) * unit_ball_volume(m) / m
        return cls((target / unit) ** (1 / m), t, n)


TestFunction = BallIndicator | Gaussian | RogersStepLog


def parse_function(text: str, n: int | None = None) -> TestFunction:
    """Parse 'ball:1.2', 'gauss:3.14' or 'rogers:r:t:n'."""
    kind, *args = text.split(":")
    if kind == "ball":
        return BallIndicator(float(args[0]))
    if kind in ("gauss", "gaussian"):
        return Gaussian(float(args[0]))
    if kind == "rogers":
        return RogersStepLog(float(args[0]), int(args[1]), int(args[2]))
    raise ValueError(f"unknown test function {text!r}")
