"""Alphabet-size planning for effective families of dense lattices.

The existence conditions are order statements; here they become explicit
inequalities with user-visible constants c1, c2 so the planner can name a prime.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from sympy import isprime, nextprime

from .cyclotomic import craig_lattice, craig_parameter_schedule
from .lattice import IntLattice, count_points, covering_radius_bound, shortest_vector
from .numerics import log_unit_ball_volume, unit_ball_volume

__all__ = [
    "point_sandwich",
    "EffectivePlan",
    "effective_plan",
    "optimal_rate",
    "craig_bounds",
    "craig_rate",
    "quaternionic_condition_i",
    "log_gaussian_binomial",
    "table1_rows",
    "packing_efficiency_goal",
    "density_bound",
]


def _is_integer_lattice_zn(lat: IntLattice) -> bool:
    m = lat.m
    return all(lat.gram[i][j] == int(i == j) for i in range(m) for j in range(m))


def point_sandwich(lat: IntLattice, r: float, l0: float | None = None, exact: bool = True) -> dict:
    """(r - l0)^m V_m <= V N(r) <= (r + l0)^m V_m, with N counting the origin.

    l0 defaults to the covering radius of Z^m (sqrt(m)/2, times the scale) and
    to a covering-radius upper bound for other lattices.
    """
    if l0 is None:
        if _is_integer_lattice_zn(lat):
            l0 = math.sqrt(float(lat.scale) * lat.m) / 2
        else:
            l0 = covering_radius_bound(lat)
    if r <= l0:
        raise ValueError(f"need r > l0 (r={r}, l0={l0})")
    vm = unit_ball_volume(lat.m)
    lower = (r - l0) ** lat.m * vm / lat.volume
    upper = (r + l0) ** lat.m * vm / lat.volume
    out = {"r": r, "l0": l0, "lower": lower, "upper": upper, "exact": None, "ok": None}
    if exact:
        n = count_points(lat, r) + 1
        out["exact"] = n
        out["ok"] = lower <= n <= upper
    return out


def log_gaussian_binomial(n: int, k: int, p: int) -> float:
    """log of the number of k-dimensional subspaces of F_p^n."""
    lp = math.log(p)
    total = 0.0
    for i in range(k):
        total += (n - i) * lp + math.log1p(-float(p) ** (i - n)) - ((k - i) * lp + math.log1p(-float(p) ** (i - k)))
    return total


def density_bound(m: int, n: int, k: int, p: int, mu: float, eps: float = 0.3) -> tuple[float, float]:
    """(1 - eps)/2^{m-1} (1 + mu/(r p^{(n-k)/m}))^{-m} with r = sqrt(m / 2 pi e); returns (value, log2 value)."""
    r = math.sqrt(m / (2 * math.pi * math.e))
    log_factor = -m * math.log1p(mu / (r * p ** ((n - k) / m)))
    log2 = math.log2(1 - eps) - (m - 1) + log_factor / math.log(2)
    return 2.0**log2, log2


def craig_rate(n: int) -> float:
    """delta ~ log log n / (2 log n + log log n)."""
    ll = math.log(math.log(n))
    return ll / (2 * math.log(n) + ll)


def craig_bounds(q: int, l: int, verify: bool = False) -> dict:
    """Normalized Hermite bounds for the Craig lattice A_n^l (n = q - 1) and its dual, plus covering bounds.

    The quoted forms use (n - 1) in the denominator. The Craig lattice has
    determinant (n + 1)^{2l - 1} in the normalization with minimum 2l, so the
    determinant-based forms use (n + 1); these are the ones the planner uses.
    """
    n = q - 1
    if not isprime(q) or not 1 <= l < q / 2:
        raise ValueError("need q prime and 1 <= l < q/2")
    lp = n - 2 * l  # dual parameter is n/2 - l
    out = {
        "q": q,
        "l": l,
        "n": n,
        "hermite_lb": math.sqrt(2 * l) / (n - 1) ** ((2 * l - 1) / (2 * n)),
        "dual_hermite_lb": math.sqrt(lp) / (n - 1) ** ((lp - 1) / (2 * n)) if lp > 0 else None,
        "hermite_lb_det": math.sqrt(2 * l) / (n + 1) ** ((2 * l - 1) / (2 * n)),
        "dual_hermite_lb_det": math.sqrt(lp) / (n + 1) ** ((lp - 1) / (2 * n)) if lp > 0 else None,
    }
    # transference: mu(L) <= (sqrt(n)/2) / gamma(L*) as used for the planner; (n/2) / gamma(L*) is rigorous
    d = out["dual_hermite_lb_det"]
    out["covering_ub"] = math.sqrt(n) / 2 / d if d else None
    out["covering_ub_rigorous"] = n / 2 / d if d else None
    if verify:
        lat = craig_lattice(q, l)
        _, l1sq = shortest_vector(lat)
        exact = math.sqrt(float(l1sq)) / math.exp(lat.log_volume / n)
        out["lambda1_sq"] = str(l1sq)
        out["hermite_exact"] = exact
        out["hermite_ok"] = exact >= out["hermite_lb"] - 1e-9
        out["hermite_det_ok"] = exact >= out["hermite_lb_det"] - 1e-9
    return out


def quaternionic_condition_i(m: int, k: int, c1: float = 1.0) -> float:
    """p >= (c1 r)^{2m/(2k - m)}, r = sqrt(m / 2 pi e); needs 2k > m. Constants are artifact defaults."""
    if 2 * k <= m:
        raise ValueError("need rank k > m/2")
    r = math.sqrt(m / (2 * math.pi * math.e))
    return (c1 * r) ** (2 * m / (2 * k - m))


@dataclass(frozen=True)
class EffectivePlan:
    base_kind: str
    n: int
    m: int
    k: int
    delta: float
    nu: float
    c1: float
    c2: float
    eps: float
    gamma_kernel: float
    mu_base: float
    p_min_i: float
    p_min_ii: float
    p_chosen: int
    density_bound: float
    log2_density_bound: float
    log_family_size: float

    def as_dict(self) -> dict:
        return asdict(self)


def _least_prime_at_least(x: float) -> int:
    return int(nextprime(max(1, math.ceil(x - 1e-9)) - 1))


def _base_parameters(base_kind: str, n: int, l: int | None) -> tuple[str, float, float]:
    """Name, Hermite parameter of the kernel p * L and covering parameter of L."""
    if base_kind == "zn":
        return "zn", 1.0, math.sqrt(n) / 2
    if base_kind == "craig":
        q = n + 1
        if not isprime(q):
            raise ValueError(f"Craig base needs n + 1 prime (n={n})")
        l = craig_parameter_schedule(n) if l is None else l
        b = craig_bounds(q, l)
        return f"craig({q},{l})", b["hermite_lb_det"], b["covering_ub"]
    raise ValueError(f"unknown base kind {base_kind!r}")


def effective_plan(
    base_kind: str,
    n: int,
    delta: float,
    nu: float = 0.01,
    c1: float = 1.0,
    c2: float = 1.0,
    eps: float = 0.3,
    l: int | None = None,
) -> EffectivePlan:
    """Thresholds (i) p >= (c1 sqrt(m)/gamma)^{m/(n delta)} and (ii) p >= (c2 m mu/gamma)^{(1+nu) m/n}."""
    if not 0 < delta < 1:
        raise ValueError("rate must lie in (0, 1)")
    if nu <= 0:
        raise ValueError("nu must be positive")
    m = n
    name, gamma, mu = _base_parameters(base_kind, n, l)
    p_i = (c1 * math.sqrt(m) / gamma) ** (m / (n * delta))
    p_ii = (c2 * m * mu / gamma) ** ((1 + nu) * m / n)
    p = _least_prime_at_least(max(p_i, p_ii, 2))
    k = max(1, round(delta * n))
    dens, log2 = density_bound(m, n, k, p, mu, eps)
    return EffectivePlan(
        name, n, m, k, delta, nu, c1, c2, eps, gamma, mu, p_i, p_ii, p, dens, log2, log_gaussian_binomial(n, k, p)
    )


def optimal_rate(
    base_kind: str, n: int, lo: float = 0.2, hi: float = 0.5, step: float = 0.001, **kw
) -> tuple[float, EffectivePlan]:
    """Grid search for the rate minimizing p_chosen; ties go to the smallest rate (smallest family)."""
    best = None
    steps = int(round((hi - lo) / step))
    for i in range(steps + 1):
        d = lo + i * step
        plan = effective_plan(base_kind, n, d, **kw)
        if best is None or plan.p_chosen < best[1].p_chosen:
            best = (d, plan)
    return best


TABLE1 = (
    ("Construction A over Z", "m = n", "1/3", "n^{3/2}", "n^2 log n"),
    ("Random double-circulant", "m = n", "1/2", "n^2 log n", "n log n"),
    ("Cyclotomic lattices", "m = 2 Phi(l)", "(2,1)", "l^3 (log l)^{Phi(l)}", "m log m"),
    ("Craig's reduction", "m = n", "loglog n/(2 log n + loglog n)", "n (log n)^{1/2}", "n^2 log log n"),
)


def table1_rows(n_list) -> list[dict]:
    """Formula columns of the comparison table, evaluated at each n with constants suppressed."""
    rows = []
    for n in n_list:
        n = float(n)
        ln, lln = math.log(n), math.log(math.log(n))
        values = (
            (1 / 3, n**1.5, n * n * ln),
            (1 / 2, n * n * ln, n * ln),
            (None, None, n * ln),
            (craig_rate(int(n)), n * math.sqrt(ln), n * n * lln),
        )
        for (name, rank, rate, p_text, fam_text), (delta, p, fam) in zip(TABLE1, values):
            rows.append(
                {
                    "n": int(n),
                    "construction": name,
                    "rank": rank,
                    "rate": rate,
                    "delta": delta,
                    "p_formula": p_text,
                    "p": p,
                    "log_family_formula": fam_text,
                    "log_family": fam,
                }
            )
    return rows


def packing_efficiency_goal(lat: IntLattice, tol: float = 0.0) -> dict:
    """rho / rho_eff with rho = lambda_1/2 and rho_eff = (V / V_m)^{1/m}."""
    _, l1sq = shortest_vector(lat)
    m = lat.m
    rho = math.sqrt(float(l1sq)) / 2
    rho_eff = math.exp((lat.log_volume - log_unit_ball_volume(m)) / m)
    ratio = rho / rho_eff
    return {"rho": rho, "rho_eff": rho_eff, "ratio": ratio, "ok": ratio >= 0.5 * (1 - tol)}
