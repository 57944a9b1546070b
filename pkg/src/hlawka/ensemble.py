"""Ensemble averages over lifted codes, the balancedness identity and density search."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath

from .config import DEFAULT_CODE_CAP, CapExceeded
from .functions import BallIndicator, Gaussian, TestFunction
from .galois import LinearCode, gaussian_binomial, iter_codes, sample_code
from .lattice import IntLattice, gaussian_tail_radius, points_in_ball, shortest_vector
from .numerics import log_unit_ball_volume, zeta
from .reduction import Reduction, lift_code

__all__ = [
    "loeliger_lhs_rhs",
    "EnsembleSpec",
    "AverageReport",
    "average_sum_f",
    "theta_average",
    "loeliger_prediction",
    "MHResult",
    "mh_search",
    "mh_radius",
]


def loeliger_lhs_rhs(p: int, n: int, k: int, g: Callable[[tuple[int, ...]], int | Fraction], cap: int = DEFAULT_CODE_CAP):
    """Both sides of the balancedness identity as exact rationals."""
    count = gaussian_binomial(n, k, p)
    if count > cap:
        raise CapExceeded(f"{count} codes exceed the cap {cap}", estimate=count)
    total = Fraction(0)
    for code in iter_codes(p, n, k):
        total += sum((Fraction(g(c)) for c in code.codewords() if any(c)), Fraction(0))
    lhs = total / count
    nonzero = (v for v in _space(p, n) if any(v))
    rhs = Fraction(p**k - 1, p**n - 1) * sum((Fraction(g(v)) for v in nonzero), Fraction(0))
    return lhs, rhs


def _space(p: int, n: int) -> Iterable[tuple[int, ...]]:
    import itertools

    return itertools.product(range(p), repeat=n)


@dataclass(frozen=True)
class EnsembleSpec:
    """The family {beta * lift(C)} over (n, k, p)-codes C, normalized to volume V."""

    reduction: Reduction
    k: int
    V: float = 1.0
    mode: str = "exhaustive"
    trials: int = 0
    seed: int | None = None
    cap: int = DEFAULT_CODE_CAP

    def __post_init__(self):
        if not 1 <= self.k <= self.reduction.n:
            raise ValueError("need 1 <= k <= n")
        if self.V <= 0:
            raise ValueError("V must be positive")
        if self.mode not in ("exhaustive", "montecarlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "montecarlo" and (self.trials < 1 or self.seed is None):
            raise ValueError("Monte Carlo mode needs trials >= 1 and an explicit seed")
        if self.mode == "exhaustive" and self.family_size > self.cap:
            raise CapExceeded(f"{self.family_size} codes exceed the cap {self.cap}", estimate=self.family_size)

    @classmethod
    def parse_mode(cls, reduction: Reduction, k: int, V: float, mode: str, **kw) -> "EnsembleSpec":
        """mode is 'exhaustive' or 'mc:TRIALS:SEED'."""
        if mode in ("exhaustive", "exh"):
            return cls(reduction, k, V, "exhaustive", **kw)
        tag, trials, seed = mode.split(":")
        if tag not in ("mc", "montecarlo"):
            raise ValueError(f"bad mode {mode!r}")
        return cls(reduction, k, V, "montecarlo", int(trials), int(seed), **kw)

    @property
    def p(self) -> int:
        return self.reduction.p

    @property
    def m(self) -> int:
        return self.reduction.m

    @property
    def family_size(self) -> int:
        return gaussian_binomial(self.reduction.n, self.k, self.p)

    @property
    def log_beta(self) -> float:
        red = self.reduction
        log_lift_vol = (red.n - self.k) * math.log(red.p) + red.base.log_volume
        return (math.log(self.V) - log_lift_vol) / red.m

    @property
    def beta(self) -> float:
        return math.exp(self.log_beta)

    def codes(self) -> list[LinearCode]:
        red = self.reduction
        if self.mode == "exhaustive":
            return list(iter_codes(red.p, red.n, self.k))
        return [sample_code(red.p, red.n, self.k, [self.seed, red.p, t]) for t in range(self.trials)]

    def to_json(self) -> dict:
        mode = "exhaustive" if self.mode == "exhaustive" else f"mc:{self.trials}:{self.seed}"
        return {"reduction": self.reduction.to_json(), "k": self.k, "V": self.V, "mode": mode}

    @classmethod
    def from_json(cls, obj: dict) -> "EnsembleSpec":
        return cls.parse_mode(Reduction.from_json(obj["reduction"]), obj["k"], obj.get("V", 1.0), obj.get("mode", "exhaustive"))


@dataclass(frozen=True)
class FiberSums:
    kernel: float
    nonkernel: float
    kernel_count: int
    nonkernel_count: int


def _scaled_radius(lat: IntLattice, f: TestFunction, beta: float) -> float:
    if f.support_radius is not None:
        return f.support_radius / beta
    return gaussian_tail_radius(lat, f.tau * beta * beta)


def fiber_sums(red: Reduction, lat: IntLattice, f: TestFunction, beta: float, primitive: bool = False) -> FiberSums:
    """Sum f(beta x) over nonzero x in lat, split by whether phi_p(x) vanishes.

    lat.basis must be expressed in coordinates of the reduction's base lattice.
    """
    pts = points_in_ball(lat, _scaled_radius(lat, f, beta), primitive)
    b2 = beta * beta
    shells: dict[bool, Counter] = {True: Counter(), False: Counter()}
    for pt in pts:
        x = [sum(c * lat.basis[i][j] for i, c in enumerate(pt.coords)) for j in range(red.m)]
        shells[not any(red(x))][pt.sqnorm] += 1
    sums = {
        key: math.fsum(c * f.value_sq(b2 * float(n)) for n, c in sorted(sh.items())) for key, sh in shells.items()
    }
    return FiberSums(sums[True], sums[False], sum(shells[True].values()), sum(shells[False].values()))


def integral_target(f: TestFunction, m: int, V: float, primitive: bool) -> float:
    t = f.integral(m) / V
    return t / zeta(m) if primitive else t


@dataclass
class AverageReport:
    estimate: float
    target: float
    abs_err: float
    rel_err: float
    stderr: float | None
    p: int
    k: int
    f: TestFunction
    primitive: bool
    kernel_term: float
    nonkernel_term: float
    trials: int
    mode: str
    exact: Fraction | None = None
    samples: list[float] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "mode": self.mode,
            "trials": self.trials,
            "f": repr(self.f),
            "primitive": self.primitive,
            "estimate": self.estimate,
            "exact": None if self.exact is None else str(self.exact),
            "target": self.target,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "stderr": self.stderr,
            "kernel_term": self.kernel_term,
            "nonkernel_term": self.nonkernel_term,
        }


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, items))


def _summarize(spec: EnsembleSpec, f, primitive, per_code: Sequence[FiberSums], target: float, offset: float = 0.0) -> AverageReport:
    n = len(per_code)
    totals = [offset + s.kernel + s.nonkernel for s in per_code]
    est = math.fsum(totals) / n
    stderr = None
    if spec.mode == "montecarlo" and n > 1:
        var = math.fsum((t - est) ** 2 for t in totals) / (n - 1)
        stderr = math.sqrt(var / n)
    exact = None
    if spec.mode == "exhaustive" and isinstance(f, BallIndicator) and offset == 0:
        exact = Fraction(sum(s.kernel_count + s.nonkernel_count for s in per_code), n)
    return AverageReport(
        estimate=est,
        target=target,
        abs_err=abs(est - target),
        rel_err=abs(est - target) / abs(target) if target else float("inf"),
        stderr=stderr,
        p=spec.p,
        k=spec.k,
        f=f,
        primitive=primitive,
        kernel_term=math.fsum(s.kernel for s in per_code) / n,
        nonkernel_term=math.fsum(s.nonkernel for s in per_code) / n,
        trials=n,
        mode=spec.mode,
        exact=exact,
        samples=totals,
    )


def average_sum_f(spec: EnsembleSpec, f: TestFunction, primitive: bool = False, threads: int = 1) -> AverageReport:
    """Average of sum f(beta x) over nonzero (or primitive) x, against the integral target."""
    red, beta = spec.reduction, spec.beta

    def one(code: LinearCode) -> FiberSums:
        return fiber_sums(red, lift_code(red, code), f, beta, primitive)

    per_code = _map(one, spec.codes(), threads)
    return _summarize(spec, f, primitive, per_code, integral_target(f, spec.m, spec.V, primitive))


def theta_average(spec: EnsembleSpec, tau: float, threads: int = 1) -> AverageReport:
    """Average theta series; the limiting value is (pi/tau)^{m/2} / V + 1."""
    red, beta = spec.reduction, spec.beta
    f = Gaussian(tau)

    def one(code: LinearCode) -> FiberSums:
        return fiber_sums(red, lift_code(red, code), f, beta)

    per_code = _map(one, spec.codes(), threads)
    target = f.integral(spec.m) / spec.V + 1
    return _summarize(spec, f, False, per_code, target, offset=1.0)


def loeliger_prediction(spec: EnsembleSpec, f: TestFunction, primitive: bool = False) -> float:
    """((p^k - 1)/(p^n - 1)) * sum of f(beta x) over base points outside the kernel.

    With primitive=True the sum runs over points primitive in the base; this is
    the exact expected primitive non-kernel sum as long as every point in the
    support has norm below p * lambda_1(base), so divisors of x stay off the kernel.
    """
    red, beta = spec.reduction, spec.beta
    eye = tuple(tuple(int(i == j) for j in range(red.m)) for i in range(red.m))
    base = IntLattice(red.base.gram, red.base.scale, eye)
    s = fiber_sums(red, base, f, beta, primitive)
    return (spec.p**spec.k - 1) / (spec.p**red.n - 1) * s.nonkernel


def mh_radius(m: int, V: float, eps: float, L: float) -> float:
    """r with vol B_r = L (1 - eps) zeta(m) V."""
    return math.exp((math.log(L * (1 - eps) * zeta(m) * V) - log_unit_ball_volume(m)) / m)


@dataclass
class MHResult:
    found: bool
    radius: float
    scanned: int
    min_count: int
    code: LinearCode | None
    lattice: IntLattice | None
    lambda1_sq: Fraction | None
    density: float | None
    density_bound: float
    certified: bool
    margin: float | None

    def as_dict(self) -> dict:
        return {
            "found": self.found,
            "radius": self.radius,
            "scanned": self.scanned,
            "min_primitive_count": self.min_count,
            "code": None if self.code is None else self.code.to_json(),
            "lambda1_sq_unscaled": None if self.lambda1_sq is None else str(self.lambda1_sq),
            "density": self.density,
            "density_bound": self.density_bound,
            "certified": self.certified,
            "margin": self.margin,
        }


def _certify(lat: IntLattice, m: int, V: float, lambda1_sq: Fraction, beta_sq_log: float, bound: float) -> tuple[float, bool, float]:
    """Packing density of beta * lat from its exact first minimum, in 60-digit arithmetic."""
    with mpmath.workdps(60):
        vm = mpmath.pi ** (mpmath.mpf(m) / 2) / mpmath.gamma(mpmath.mpf(m) / 2 + 1)
        # beta^m = V / V(lat), so the density is V_m (lambda_1 / 2)^m / V(lat)
        l1 = mpmath.sqrt(mpmath.mpf(lambda1_sq.numerator) / lambda1_sq.denominator)
        det = lat.det
        vol = mpmath.sqrt(mpmath.mpf(det.numerator) / det.denominator)
        dens = vm * (l1 / 2) ** m / vol
        margin = dens - mpmath.mpf(bound)
        return float(dens), bool(margin >= 0), float(margin)


def mh_search(spec: EnsembleSpec, eps: float = 0.3, L: float = 2, stop_at_first: bool = True) -> MHResult:
    """Scan the ensemble for a lattice with no primitive points in the closed ball B_r.

    A hit is certified by recomputing lambda_1 with an exact SVP; the emitted
    density bound is L (1 - eps) / 2^m.
    """
    red, beta = spec.reduction, spec.beta
    m = red.m
    r = mh_radius(m, spec.V, eps, L)
    bound = L * (1 - eps) / 2**m
    best = None
    min_count = None
    scanned = 0
    for code in spec.codes():
        scanned += 1
        lat = lift_code(red, code)
        cnt = len(points_in_ball(lat, r / beta, primitive_only=True))
        if min_count is None or cnt < min_count:
            min_count = cnt
        if cnt == 0:
            _, l1sq = shortest_vector(lat)
            dens, ok, margin = _certify(lat, m, spec.V, l1sq, 2 * spec.log_beta, bound)
            cand = (dens, code, lat, l1sq, ok, margin)
            if best is None or dens > best[0]:
                best = cand
            if stop_at_first:
                break
    if best is None:
        return MHResult(False, r, scanned, min_count or 0, None, None, None, None, bound, False, None)
    dens, code, lat, l1sq, ok, margin = best
    return MHResult(True, r, scanned, 0, code, lat, l1sq, dens, bound, ok, margin)
