"""Exact integer lattices: Gram arithmetic, LLL, enumeration, theta series, densities.

A lattice is an integer Gram matrix G plus a positive rational scale s; true
inner products are s * x^T G y. Floating point only ever prunes enumeration
radii, and every enumerated point is re-checked with integer arithmetic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_SVP_RANK_CAP, DEFAULT_TAIL_EPS, CapExceeded, point_cap
from .functions import Gaussian, TestFunction
from .numerics import log_unit_ball_volume, unit_ball_volume

Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in r) for r in rows)


def bareiss_minors(mat: Sequence[Sequence[int]]) -> list[int]:
    """Leading principal minors d_1..d_m by fraction-free elimination.

    Stops early (returning the minors found so far plus 0) on a zero pivot.
    """
    a = [list(r) for r in mat]
    m = len(a)
    minors = []
    prev = 1
    for k in range(m):
        if a[k][k] == 0:
            minors.append(0)
            return minors
        minors.append(a[k][k])
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return minors


def det_int(mat: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix."""
    m = len(mat)
    if m == 0:
        return 1
    a = [[Fraction(v) for v in r] for r in mat]
    det = Fraction(1)
    for c in range(m):
        piv = next((i for i in range(c, m) if a[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, m):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return int(det)


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(c) for c in zip(*a))


def congruence(u: Sequence[Sequence[int]], g: Sequence[Sequence[int]]) -> Matrix:
    """U G U^T: Gram of the basis whose rows are U in old coordinates."""
    return mat_mul(mat_mul(u, g), transpose(u))


def rational_inverse(mat: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    m = len(mat)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(m)] for i, r in enumerate(mat)]
    for c in range(m):
        piv = next(i for i in range(c, m) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(m):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [r[m:] for r in a]


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple[int, ...]
    sqnorm: Fraction

    @property
    def primitive(self) -> bool:
        return gcd(*self.coords) == 1


@dataclass(frozen=True)
class IntLattice:
    """Rank-m lattice with Gram scale * gram; optional integer basis rows."""

    gram: Matrix
    scale: Fraction = Fraction(1)
    basis: Matrix | None = None

    def __post_init__(self):
        object.__setattr__(self, "gram", _as_matrix(self.gram))
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.basis is not None:
            object.__setattr__(self, "basis", _as_matrix(self.basis))
            if len(self.basis) != len(self.gram):
                raise ValueError("basis must have one row per Gram row")
        g = self.gram
        m = len(g)
        if any(len(r) != m for r in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(m) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if m and min(bareiss_minors(g)) <= 0:
            raise ValueError("Gram matrix is not positive definite")

    @classmethod
    def identity(cls, m: int) -> "IntLattice":
        eye = tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
        return cls(eye, Fraction(1), eye)

    @classmethod
    def from_basis(cls, rows: Sequence[Sequence[int]], scale=Fraction(1)) -> "IntLattice":
        rows = _as_matrix(rows)
        return cls(mat_mul(rows, transpose(rows)), scale, rows)

    @property
    def m(self) -> int:
        return len(self.gram)

    @cached_property
    def det_gram(self) -> int:
        return det_int(self.gram)

    @property
    def det(self) -> Fraction:
        """Determinant of the true Gram matrix, i.e. volume squared."""
        return self.scale**self.m * self.det_gram

    @property
    def volume(self) -> float:
        return math.exp(self.log_volume)

    @property
    def log_volume(self) -> float:
        d = self.det
        return 0.5 * (math.log(d.numerator) - math.log(d.denominator))

    def sqnorm(self, coords: Sequence[int]) -> Fraction:
        return self.scale * self.form(coords)

    def form(self, coords: Sequence[int]) -> int:
        g = self.gram
        return sum(coords[i] * sum(g[i][j] * coords[j] for j in range(self.m)) for i in range(self.m))

    def rescaled(self, factor) -> "IntLattice":
        """Lattice beta * L where factor = beta^2."""
        return IntLattice(self.gram, self.scale * Fraction(factor), self.basis)

    def change_basis(self, u: Sequence[Sequence[int]]) -> "IntLattice":
        """Same lattice (if U is unimodular) in the basis given by the rows of U."""
        u = _as_matrix(u)
        basis = mat_mul(u, self.basis) if self.basis is not None else u
        return IntLattice(congruence(u, self.gram), self.scale, basis)

    def to_json(self) -> dict:
        out = {"m": self.m, "gram": [list(r) for r in self.gram], "scale_num": self.scale.numerator, "scale_den": self.scale.denominator}
        if self.basis is not None:
            out["basis"] = [list(r) for r in self.basis]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "IntLattice":
        lat = cls(obj["gram"], Fraction(obj.get("scale_num", 1), obj.get("scale_den", 1)), obj.get("basis"))
        if "m" in obj and obj["m"] != lat.m:
            raise ValueError("m does not match Gram size")
        return lat

    @cached_property
    def _enum(self) -> "_Enumerator":
        return _Enumerator(self.gram)


# --- LLL ----------------------------------------------------------------------


def lll_gram(gram: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> tuple[Matrix, Matrix]:
    """Integral LLL on a positive-definite Gram matrix.

    All Gram-Schmidt data is kept as integers (d_i and lambda_ij), so the
    Lovasz test is exact. Returns (reduced Gram, U) with reduced = U G U^T.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    da, db = delta.numerator, delta.denominator
    m = len(gram)
    g = [list(r) for r in gram]
    h = [[int(i == j) for j in range(m)] for i in range(m)]
    if m <= 1:
        return _as_matrix(g), _as_matrix(h)
    d = [0] * (m + 1)  # d[0] = 1, d[i+1] is the i-th leading minor
    d[0] = 1
    lam = [[0] * m for _ in range(m)]

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) <= d[l + 1]:
            return
        q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
        h[k] = [a - q * b for a, b in zip(h[k], h[l])]
        g[k] = [a - q * b for a, b in zip(g[k], g[l])]
        for i in range(m):
            g[i][k] -= q * g[i][l]
        lam[k][l] -= q * d[l + 1]
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    def swap(k: int) -> None:
        h[k], h[k - 1] = h[k - 1], h[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        b = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
            lam[i][k - 1] = (b * t + lk * lam[i][k]) // d[k + 1]
        d[k] = b

    d[1] = g[0][0]
    k, kmax = 1, 0
    while k < m:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = g[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
                    if u <= 0:
                        raise ValueError("Gram matrix is not positive definite")
        red(k, k - 1)
        # Lovasz: d_{k+1} d_{k-1} >= delta d_k^2 - lambda^2
        if db * d[k + 1] * d[k - 1] < da * d[k] * d[k] - db * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return _as_matrix(g), _as_matrix(h)


def lll_reduce(lat: IntLattice, delta: Fraction = Fraction(99, 100)) -> IntLattice:
    """LLL-reduced basis of the same lattice; the new basis rows are recorded."""
    _, u = lll_gram(lat.gram, delta)
    return lat.change_basis(u)


def gram_schmidt_sq(gram: Sequence[Sequence[int]]) -> list[Fraction]:
    """Exact squared Gram-Schmidt norms |b_i*|^2 (unscaled)."""
    minors = bareiss_minors(gram)
    out = []
    prev = 1
    for dm in minors:
        out.append(Fraction(dm, prev))
        prev = dm
    return out


def gso_mu(gram: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    m = len(gram)
    mu = [[Fraction(0)] * m for _ in range(m)]
    bstar = [Fraction(0)] * m
    for i in range(m):
        for j in range(i):
            s = Fraction(gram[i][j]) - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
            mu[i][j] = s / bstar[j]
        bstar[i] = Fraction(gram[i][i]) - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
    return mu


def is_lll_reduced(gram: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> bool:
    mu = gso_mu(gram)
    b = gram_schmidt_sq(gram)
    m = len(gram)
    if any(abs(mu[i][j]) > Fraction(1, 2) for i in range(m) for j in range(i)):
        return False
    return all(b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1] for k in range(1, m))


# --- enumeration ----------------------------------------------------------------


class _Enumerator:
    """Fincke-Pohst over an LLL-reduced copy of a Gram matrix."""

    def __init__(self, gram: Matrix):
        self.gram = gram
        self.m = len(gram)
        self.red_gram, self.u = lll_gram(gram)
        g = np.array(self.red_gram, dtype=float)
        r = np.linalg.cholesky(g).T  # upper, G = R^T R
        diag = np.diag(r)
        self.qd = (diag * diag).tolist()
        self.qo = (r / diag[:, None]).tolist()
        self.min_diag = min(self.red_gram[i][i] for i in range(self.m))

    def reduced_points(self, bound: int) -> list[tuple[tuple[int, ...], int]]:
        """Nonzero y with y^T G_red y <= bound, exact, in reduced coordinates."""
        m = self.m
        qd, qo, gr = self.qd, self.qo, self.red_gram
        out: list[tuple[tuple[int, ...], int]] = []
        if bound <= 0:
            return out
        fbound = bound * (1 + 1e-9) + 1e-9
        x = [0] * m
        floor, ceil, sqrt = math.floor, math.ceil, math.sqrt

        def rec(i: int, remaining: float) -> None:
            row = qo[i]
            c = 0.0
            for j in range(i + 1, m):
                c -= row[j] * x[j]
            t = sqrt(max(remaining, 0.0) / qd[i])
            lo = ceil(c - t - 1e-9)
            hi = floor(c + t + 1e-9)
            q = qd[i]
            for v in range(lo, hi + 1):
                rem = remaining - q * (v - c) ** 2
                if rem < -1e-9 * fbound - 1e-9:
                    continue
                x[i] = v
                if i == 0:
                    if any(x):
                        nrm = 0
                        for a in range(m):
                            if x[a]:
                                ga = gr[a]
                                nrm += x[a] * sum(ga[b] * x[b] for b in range(m) if x[b])
                        if nrm <= bound:
                            out.append((tuple(x), nrm))
                else:
                    rec(i - 1, rem)
            x[i] = 0

        rec(m - 1, fbound)
        return out

    def points(self, bound: int) -> list[tuple[tuple[int, ...], int]]:
        """Nonzero x with x^T G x <= bound, in the original coordinates."""
        u = self.u
        m = self.m
        res = []
        for y, nrm in self.reduced_points(bound):
            xs = tuple(sum(y[i] * u[i][j] for i in range(m) if y[i]) for j in range(m))
            res.append((xs, nrm))
        return res


def _bound_for_radius(lat: IntLattice, r: float | Fraction) -> int:
    """Largest integer form value N with scale * N <= r^2."""
    r2 = Fraction(r) ** 2
    return math.floor(r2 / lat.scale)


def gs_covering_bound(lat: IntLattice) -> float:
    """Half the diameter of the Babai cell of an LLL basis; bounds the covering radius."""
    b = gram_schmidt_sq(lat._enum.red_gram)
    return 0.5 * math.sqrt(float(lat.scale * sum(b)))


def dual(lat: IntLattice) -> IntLattice:
    """Dual lattice, stored as adj(G) with scale 1/(s det G)."""
    det = lat.det_gram
    inv = rational_inverse(lat.gram)
    adj = [[int(v * det) for v in row] for row in inv]
    return IntLattice(adj, 1 / (lat.scale * det))


def covering_radius_bound(lat: IntLattice, use_dual: bool = True) -> float:
    """Upper bound on the covering radius.

    Minimum of the Babai-cell bound and Banaszczyk's transference
    mu(L) * lambda_1(L*) <= m/2 (the latter only when rank allows SVP).
    """
    bound = gs_covering_bound(lat)
    if use_dual and lat.m <= 10:
        _, l1sq = shortest_vector(dual(lat))
        bound = min(bound, (lat.m / 2) / math.sqrt(float(l1sq)))
    return bound


def _check_svp_cap(lat: IntLattice, cap: int) -> None:
    if lat.m > cap:
        raise CapExceeded(f"rank {lat.m} exceeds the SVP rank cap {cap}")


def _canonical_sign(x: tuple[int, ...]) -> tuple[int, ...]:
    for v in x:
        if v:
            return x if v > 0 else tuple(-a for a in x)
    return x


def shortest_vector(lat: IntLattice, rank_cap: int = DEFAULT_SVP_RANK_CAP) -> tuple[LatticePoint, Fraction]:
    """Exact first minimum (squared) and a minimizer.

    Ties go to the lexicographically least coordinate vector whose first
    nonzero entry is positive.
    """
    _check_svp_cap(lat, rank_cap)
    en = lat._enum
    pts = en.points(en.min_diag)
    best = min(n for _, n in pts)
    cand = sorted({_canonical_sign(x) for x, n in pts if n == best})
    sq = lat.scale * best
    return LatticePoint(cand[0], sq), sq


def _rational_rank_add(echelon: list[list[Fraction]], vec: Sequence[int]) -> bool:
    """Try to extend a row-echelon basis by vec; True if the rank grew."""
    v = [Fraction(a) for a in vec]
    for row in echelon:
        piv = next(i for i, a in enumerate(row) if a)
        if v[piv]:
            f = v[piv] / row[piv]
            v = [a - f * b for a, b in zip(v, row)]
    if any(v):
        echelon.append(v)
        return True
    return False


def successive_minima(lat: IntLattice, upto: int | None = None, rank_cap: int = DEFAULT_SVP_RANK_CAP) -> list[Fraction]:
    """Exact squared successive minima lambda_1^2 .. lambda_upto^2."""
    _check_svp_cap(lat, rank_cap)
    upto = lat.m if upto is None else upto
    if not 1 <= upto <= lat.m:
        raise ValueError("upto must lie in [1, m]")
    en = lat._enum
    bound = max(en.red_gram[i][i] for i in range(upto))
    pts = sorted(en.reduced_points(bound), key=lambda t: t[1])
    echelon: list[list[Fraction]] = []
    minima: list[Fraction] = []
    for y, nrm in pts:
        if _rational_rank_add(echelon, y):
            minima.append(lat.scale * nrm)
            if len(minima) == upto:
                break
    return minima


def _pre_estimate(lat: IntLattice, r: float, l0: float | None = None) -> float:
    if l0 is None:
        l0 = gs_covering_bound(lat)
    return math.exp(lat.m * math.log(r + l0) + log_unit_ball_volume(lat.m) - lat.log_volume)


def points_in_ball(lat: IntLattice, r: float | Fraction, primitive_only: bool = False, cap: int | None = None) -> list[LatticePoint]:
    """Nonzero points with squared norm <= r^2, sorted by norm then coordinates."""
    cap = point_cap() if cap is None else cap
    est = _pre_estimate(lat, float(r))
    if est > cap:
        raise CapExceeded(f"about {est:.3g} points in the ball exceed the cap {cap}", estimate=point_bounds(lat, float(r)))
    bound = _bound_for_radius(lat, r)
    pts = lat._enum.points(bound)
    if primitive_only:
        pts = [(x, n) for x, n in pts if gcd(*x) == 1]
    pts.sort(key=lambda t: (t[1], t[0]))
    return [LatticePoint(x, lat.scale * n) for x, n in pts]


def count_points(lat: IntLattice, r: float | Fraction, primitive_only: bool = False, cap: int | None = None) -> int:
    """Nonzero (or primitive) lattice points of norm at most r; origin excluded."""
    return len(points_in_ball(lat, r, primitive_only, cap))


def point_bounds(lat: IntLattice, r: float, l0: float | None = None) -> tuple[float, float]:
    """Bracket on #(L cap B_r) (origin included) from the fundamental-cell sandwich."""
    if l0 is None:
        l0 = covering_radius_bound(lat, use_dual=False)
    vm = unit_ball_volume(lat.m)
    lower = max(r - l0, 0.0) ** lat.m * vm / lat.volume
    upper = (r + l0) ** lat.m * vm / lat.volume
    return lower, upper


def gaussian_tail_radius(lat: IntLattice, tau: float, eps: float = DEFAULT_TAIL_EPS, l0: float | None = None) -> float:
    """Radius R with sum_{|x| > R} exp(-tau |x|^2) < eps, certified shell by shell.

    A shell (R + j h, R + (j+1) h] holds at most N(R + (j+1) h) points,
    and N(rho) <= (rho + l0)^m V_m / V.
    """
    if l0 is None:
        l0 = covering_radius_bound(lat, use_dual=False)
    m = lat.m
    log_c = log_unit_ball_volume(m) - lat.log_volume
    h = 0.5 / math.sqrt(tau)

    def tail(radius: float) -> float:
        # terms are log-concave in j, so once the ratio drops below 1/2 the
        # remainder is at most the last term
        total = 0.0
        prev = None
        j = 0
        while True:
            lo = radius + j * h
            term = math.exp(log_c + m * math.log(lo + h + l0) - tau * lo * lo)
            total += term
            if prev is not None and term < 0.5 * prev and term < 1e-3 * eps:
                return total + term
            prev = term
            j += 1

    radius = math.sqrt(max(math.log(1 / eps), 1.0) / tau)
    while tail(radius) >= eps:
        radius *= 1.1
    return radius


def theta_series(lat: IntLattice, tau: float, eps: float = DEFAULT_TAIL_EPS) -> float:
    """sum_{x in L} exp(-tau |x|^2), origin term included, tail below eps."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return 1.0 + sum_test_function(lat, Gaussian(tau), eps=eps)


def sum_test_function(lat: IntLattice, f: TestFunction, primitive_only: bool = False, eps: float = DEFAULT_TAIL_EPS) -> float:
    """sum of f(x) over nonzero (or primitive) points."""
    radius = f.support_radius
    if radius is None:
        radius = gaussian_tail_radius(lat, f.tau, eps)
    pts = points_in_ball(lat, radius, primitive_only)
    shells = Counter(p.sqnorm for p in pts)
    return math.fsum(c * f.value_sq(float(n)) for n, c in sorted(shells.items()))


def theta_coefficients(lat: IntLattice, max_form: int) -> dict[int, int]:
    """Number of vectors per integer Gram-form value up to max_form (origin at 0)."""
    out = Counter({0: 1})
    for _, n in lat._enum.points(max_form):
        out[n] += 1
    return dict(sorted(out.items()))


# --- densities -------------------------------------------------------------------


@dataclass
class DensityReport:
    lambda1_sq: Fraction
    volume: float
    packing_density: float
    hermite: float
    successive_densities: list[float] = field(default_factory=list)
    packing_efficiency: float = 0.0

    def as_dict(self) -> dict:
        return {
            "lambda1_sq": str(self.lambda1_sq),
            "volume": self.volume,
            "packing_density": self.packing_density,
            "hermite": self.hermite,
            "successive_densities": self.successive_densities,
            "packing_efficiency": self.packing_efficiency,
        }


def ball_density(radius: float, m: int, log_volume: float) -> float:
    return math.exp(log_unit_ball_volume(m) + m * math.log(radius) - log_volume)


def density_report(lat: IntLattice, successive: int | None = None) -> DensityReport:
    """Packing density, Hermite parameter, successive densities and packing efficiency."""
    m = lat.m
    _, l1sq = shortest_vector(lat)
    l1 = math.sqrt(float(l1sq))
    lv = lat.log_volume
    rep = DensityReport(
        lambda1_sq=l1sq,
        volume=lat.volume,
        packing_density=ball_density(l1 / 2, m, lv),
        hermite=l1 / math.exp(lv / m),
        packing_efficiency=(l1 / 2) / math.exp((lv - log_unit_ball_volume(m)) / m),
    )
    if successive:
        mins = successive_minima(lat, successive)
        rep.successive_densities = [ball_density(math.sqrt(float(s)) / 2, m, lv) for s in mins]
    return rep
