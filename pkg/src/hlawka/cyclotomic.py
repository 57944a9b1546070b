"""Prime-conductor cyclotomic fields Q(zeta_q) through exact trace forms.

Elements of Z[zeta] are integer vectors over the power basis
1, zeta, ..., zeta^{q-2}; the relation zeta^{q-1} = -(1 + ... + zeta^{q-2})
is applied after every product. Ideal lattices carry the integer Gram
matrix Tr(x conj(y)), so no floating embedding is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from sympy import isprime, nextprime

from .config import CapExceeded
from .functions import RogersStepLog
from .galois import gaussian_binomial, iter_codes, sample_code
from .lattice import IntLattice, _rational_rank_add, points_in_ball, sum_test_function
from .numerics import log_unit_ball_volume, zeta
from .reduction import Reduction, lift_code, normalize

Elem = tuple[int, ...]


@dataclass(frozen=True)
class CycField:
    q: int

    def __post_init__(self):
        if self.q < 3 or not isprime(self.q):
            raise ValueError("conductor must be an odd prime")

    @property
    def n(self) -> int:
        return self.q - 1

    @property
    def roots_of_unity(self) -> int:
        return 2 * self.q

    def _reduce(self, full: Sequence[int]) -> Elem:
        """Length-q coefficient vector (mod x^q - 1) to the power basis."""
        top = full[self.q - 1]
        return tuple(full[i] - top for i in range(self.n))

    def one(self) -> Elem:
        return tuple(int(i == 0) for i in range(self.n))

    def zeta_power(self, e: int) -> Elem:
        full = [0] * self.q
        full[e % self.q] = 1
        return self._reduce(full)

    def mul(self, x: Sequence[int], y: Sequence[int]) -> Elem:
        q = self.q
        full = [0] * q
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        full[(i + j) % q] += a * b
        return self._reduce(full)

    def add(self, x: Sequence[int], y: Sequence[int]) -> Elem:
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x: Sequence[int], y: Sequence[int]) -> Elem:
        return tuple(a - b for a, b in zip(x, y))

    def pow(self, x: Sequence[int], e: int) -> Elem:
        out = self.one()
        for _ in range(e):
            out = self.mul(out, x)
        return out

    def conj(self, x: Sequence[int]) -> Elem:
        full = [0] * self.q
        for i, a in enumerate(x):
            full[(-i) % self.q] += a
        return self._reduce(full)

    def trace(self, x: Sequence[int]) -> int:
        """Tr(1) = q - 1 and Tr(zeta^a) = -1 for a not divisible by q."""
        return self.n * x[0] - sum(x[1:])

    def trace_form(self, x: Sequence[int], y: Sequence[int]) -> int:
        return self.trace(self.mul(x, self.conj(y)))

    def trace_gram(self, elems: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.trace_form(a, b) for b in elems) for a in elems)

    def multiplication_matrix(self, alpha: Sequence[int]) -> tuple[tuple[int, ...], ...]:
        """Rows are alpha * zeta^i, so coords(alpha x) = coords(x) @ matrix."""
        return tuple(self.mul(alpha, self.zeta_power(i)) for i in range(self.n))

    def power_basis_gram(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.n if i == j else -1 for j in range(self.n)) for i in range(self.n))

    def ideal_basis(self, alpha: Sequence[int]) -> tuple[Elem, ...]:
        """Z-basis alpha * zeta^i of the principal ideal (alpha)."""
        return self.multiplication_matrix(alpha)

    def residue(self, x: Sequence[int], p: int, g: int) -> int:
        """Image of x under Z[zeta] -> Z[zeta]/(p, zeta - g) = F_p."""
        return sum(a * pow(g, i, p) for i, a in enumerate(x)) % p


def ring_of_integers(q: int, t: int = 1) -> IntLattice:
    """Z[zeta_q]^t with the block-diagonal trace form."""
    fld = CycField(q)
    blk = fld.power_basis_gram()
    n = fld.n
    gram = [[0] * (n * t) for _ in range(n * t)]
    for b in range(t):
        for i in range(n):
            for j in range(n):
                gram[b * n + i][b * n + j] = blk[i][j]
    eye = [[int(i == j) for j in range(n * t)] for i in range(n * t)]
    return IntLattice(gram, Fraction(1), eye)


def craig_lattice(q: int, l: int) -> IntLattice:
    """Ideal (1 - zeta)^l of Z[zeta_q] with trace form scaled by 1/q."""
    if not 1 <= l < q / 2:
        raise ValueError("need 1 <= l < q/2")
    fld = CycField(q)
    one_minus = fld.sub(fld.one(), fld.zeta_power(1))
    alpha = fld.pow(one_minus, l)
    rows = fld.ideal_basis(alpha)
    return IntLattice(fld.trace_gram(rows), Fraction(1, q), rows)


def craig_parameter_schedule(n: int) -> int:
    """l = round(n / (2 log(n + 1))), at least 1."""
    return max(1, round(n / (2 * math.log(n + 1))))


def root_of_order(q: int, p: int) -> int:
    """Least g = h^{(p-1)/q} != 1 over h = 2, 3, ...; requires p = 1 mod q."""
    if (p - 1) % q:
        raise ValueError(f"{p} is not 1 mod {q}")
    e = (p - 1) // q
    for h in range(2, p):
        g = pow(h, e, p)
        if g != 1:
            return g
    raise ValueError("no element of order q")


def split_primes(q: int, count: int, start: int = 2, search_cap: int = 10**7) -> list[tuple[int, int]]:
    """First `count` primes p >= start with p = 1 mod q, each with a root g of order q."""
    CycField(q)
    out = []
    p = start - 1
    while len(out) < count:
        p = nextprime(p)
        if p > search_cap:
            raise CapExceeded(f"split-prime search passed {search_cap}")
        if p % q == 1:
            out.append((p, root_of_order(q, p)))
    return out


def ideal_reduction(q: int, t: int, p: int, g: int) -> Reduction:
    """phi_p(x_1..x_t) = (pi(x_1)..pi(x_t)) with pi(zeta) = g mod p."""
    fld = CycField(q)
    if (p - 1) % q or not isprime(p):
        raise ValueError(f"{p} does not split completely in Q(zeta_{q})")
    if pow(g, q, p) != 1 or g % p == 1:
        raise ValueError(f"{g} is not a primitive q-th root of unity mod {p}")
    n = fld.n
    row = [pow(g, i, p) for i in range(n)]
    mat = []
    for b in range(t):
        r = [0] * (n * t)
        r[b * n : (b + 1) * n] = row
        mat.append(tuple(r))
    return Reduction(ring_of_integers(q, t), p, t, tuple(mat))


def multiply_ambient(fld: CycField, alpha: Sequence[int], vec: Sequence[int]) -> tuple[int, ...]:
    """alpha * (x_1, ..., x_t) for a flat vector of t power-basis blocks."""
    n = fld.n
    out: list[int] = []
    for b in range(len(vec) // n):
        out.extend(fld.mul(alpha, vec[b * n : (b + 1) * n]))
    return tuple(out)


def ambient_coords(lat: IntLattice, coords: Sequence[int]) -> tuple[int, ...]:
    basis = lat.basis
    d = len(basis[0])
    return tuple(sum(c * basis[i][j] for i, c in enumerate(coords) if c) for j in range(d))


class _KRank:
    """Incremental K-rank of vectors in K^t, tracked as Q-rank of zeta-orbits."""

    def __init__(self, fld: CycField):
        self.fld = fld
        self.echelon: list = []
        self.rank = 0

    def add(self, vec: Sequence[int]) -> bool:
        probe = list(self.echelon)
        if not _rational_rank_add(probe, vec):
            return False
        z = self.fld.zeta_power(1)
        v = tuple(vec)
        for _ in range(self.fld.n):
            _rational_rank_add(self.echelon, v)
            v = multiply_ambient(self.fld, z, v)
        self.rank += 1
        return True


@dataclass
class KSuccessiveMinima:
    t: int
    values: list[Fraction]
    witnesses: list[tuple[int, ...]]


def k_successive_minima(lat: IntLattice, q: int, t: int) -> KSuccessiveMinima:
    """Squared K-successive minima of a Z[zeta_q]-module lattice in Z[zeta_q]^t.

    The lattice basis must give ambient power-basis coordinates.
    """
    if lat.basis is None or len(lat.basis[0]) != (q - 1) * t:
        raise ValueError("lattice needs a basis in ambient Z[zeta]^t coordinates")
    fld = CycField(q)
    en = lat._enum
    order = sorted(range(lat.m), key=lambda i: en.red_gram[i][i])
    kr = _KRank(fld)
    bound = 0
    for i in order:
        y = en.u[i]
        if kr.add(ambient_coords(lat, y)):
            bound = max(bound, en.red_gram[i][i])
            if kr.rank == t:
                break
    if kr.rank < t:
        raise ValueError("lattice does not have K-rank t")
    pts = sorted(en.points(bound), key=lambda a: (a[1], a[0]))
    kr = _KRank(fld)
    values, witnesses = [], []
    for x, nrm in pts:
        amb = ambient_coords(lat, x)
        if kr.add(amb):
            values.append(lat.scale * nrm)
            witnesses.append(amb)
            if kr.rank == t:
                break
    return KSuccessiveMinima(t, values, witnesses)


def minimal_vector_orbits(lat: IntLattice, q: int) -> tuple[int, bool]:
    """Number of shortest vectors and whether the set is closed under +-zeta."""
    from .lattice import shortest_vector

    _, l1 = shortest_vector(lat)
    pts = points_in_ball(lat, math.sqrt(float(l1)) * (1 + 1e-12))
    mins = {ambient_coords(lat, pt.coords) for pt in pts if pt.sqnorm == l1}
    fld = CycField(q)
    z = fld.zeta_power(1)
    closed = all(multiply_ambient(fld, z, v) in mins and tuple(-a for a in v) in mins for v in mins)
    return len(mins), closed


# --- Rogers successive-density search -----------------------------------------------


def rogers_rhs(q: int, t: int, eps: float) -> float:
    """r(K) t zeta(nt)(1 - eps) / (e (1 - e^{-t}) 2^{nt})."""
    n = q - 1
    return 2 * q * t * zeta(n * t) * (1 - eps) / (math.e * (1 - math.exp(-t)) * 2 ** (n * t))


@dataclass
class RogersResult:
    q: int
    t: int
    k: int
    eps: float
    rhs: float
    threshold: float
    rows: list[dict] = field(default_factory=list)

    @property
    def acceptors(self) -> list[dict]:
        return [r for r in self.rows if r["accepted"]]

    @property
    def found(self) -> bool:
        return bool(self.acceptors)

    @property
    def best(self) -> dict | None:
        acc = self.acceptors
        return max(acc, key=lambda r: r["density_product_lhs"]) if acc else None

    @property
    def min_sum(self) -> float:
        return min(r["sum_f"] for r in self.rows)


def rogers_density_search(
    q: int,
    t: int,
    p_list: Sequence[int],
    k: int,
    trials: int = 10**4,
    seed: int = 0,
    eps: float = 0.5,
    volume: float = 1.0,
) -> RogersResult:
    """Scan ideal-reduction ensembles for lattices whose Rogers sum passes the threshold.

    For each accepted lattice the K-successive minima are computed and the
    product of successive densities is reported next to the guaranteed bound.
    """
    if t < 2:
        raise ValueError("the successive-density argument needs t >= 2")
    if not 1 <= k <= t:
        raise ValueError("need 1 <= k <= t")
    fld = CycField(q)
    n = fld.n
    dim = n * t
    rk = fld.roots_of_unity
    target = rk * volume * zeta(dim) * (1 - eps) / n
    f = RogersStepLog.for_integral(target, t, n)
    res = RogersResult(q, t, k, eps, rogers_rhs(q, t, eps), (1 - eps) * rk / n)
    for p in p_list:
        red = ideal_reduction(q, t, p, root_of_order(q, p))
        total = gaussian_binomial(t, k, p)
        if total <= trials:
            codes = [(None, c) for c in iter_codes(p, t, k)]
        else:
            codes = [(i, sample_code(p, t, k, [seed, p, i])) for i in range(trials)]
        for idx, (trial, code) in enumerate(codes):
            lat, _ = normalize(lift_code(red, code), volume)
            s = sum_test_function(lat, f, primitive_only=True)
            row = {
                "seed": seed if trial is not None else "",
                "p": p,
                "code_id": idx,
                "sum_f": s,
                "accepted": s <= res.threshold,
                "lambda_K_sq": [],
                "density_product_lhs": float("nan"),
                "rhs": res.rhs,
            }
            if row["accepted"]:
                km = k_successive_minima(lat, q, t)
                row["lambda_K_sq"] = [float(v) for v in km.values]
                log_prod = sum(
                    log_unit_ball_volume(dim) + dim * math.log(math.sqrt(float(v)) / 2) - math.log(volume)
                    for v in km.values
                )
                row["density_product_lhs"] = math.exp(log_prod / t)
            res.rows.append(row)
    return res
