"""Lipschitz and Hurwitz quaternion orders reduced onto M_2(F_p)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from sympy import isprime

from .galois import FreeMatCode, Mat2, MatRing2, enumerate_free_modules, unflatten
from .lattice import IntLattice, points_in_ball
from .reduction import Reduction, lift_code

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Quat:
    """a + b i + c j + d k with rational coordinates."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def __mul__(self, o: "Quat") -> "Quat":
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return Quat(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __add__(self, o: "Quat") -> "Quat":
        return Quat(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "Quat") -> "Quat":
        return Quat(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self) -> "Quat":
        return Quat(-self.a, -self.b, -self.c, -self.d)

    def conj(self) -> "Quat":
        return Quat(self.a, -self.b, -self.c, -self.d)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d)

    @property
    def sqnorm(self) -> Fraction:
        return self.a**2 + self.b**2 + self.c**2 + self.d**2

    nrd = sqnorm

    def is_lipschitz(self) -> bool:
        return all(x.denominator == 1 for x in self.coords)

    def is_hurwitz(self) -> bool:
        dens = {x.denominator for x in self.coords}
        return dens == {1} or dens == {2}


ONE = Quat(1, 0, 0, 0)
I = Quat(0, 1, 0, 0)
J = Quat(0, 0, 1, 0)
K = Quat(0, 0, 0, 1)
OMEGA = Quat(-HALF, HALF, HALF, HALF)  # (-1 + i + j + ij)/2


def lipschitz_units() -> list[Quat]:
    return [Quat(*(s if t == idx else 0 for t in range(4))) for idx in range(4) for s in (1, -1)]


def hurwitz_units() -> list[Quat]:
    halves = [Quat(*(HALF * s for s in signs)) for signs in itertools.product((1, -1), repeat=4)]
    return lipschitz_units() + halves


# Z-basis of the Hurwitz order and its doubled (integral, D_4) Gram matrix
HURWITZ_BASIS = (ONE, I, J, OMEGA)


def _dot(x: Quat, y: Quat) -> Fraction:
    return sum(a * b for a, b in zip(x.coords, y.coords))


def hurwitz_gram() -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(2 * _dot(x, y)) for y in HURWITZ_BASIS) for x in HURWITZ_BASIS)


def hurwitz_coords(x: Quat) -> tuple[int, ...]:
    """Coordinates of a Hurwitz integer in the basis 1, i, j, omega."""
    w = 2 * x.d
    out = (x.a + w / 2, x.b - w / 2, x.c - w / 2, w)
    if any(v.denominator != 1 for v in out):
        raise ValueError(f"{x} is not a Hurwitz integer")
    return tuple(int(v) for v in out)


def from_hurwitz_coords(v: Sequence[int]) -> Quat:
    out = Quat(0, 0, 0, 0)
    for c, e in zip(v, HURWITZ_BASIS):
        out = out + Quat(*(c * t for t in e.coords))
    return out


def _mat_mod(m: Sequence[Fraction | int], p: int) -> Mat2:
    out = []
    for v in m:
        v = Fraction(v)
        out.append(v.numerator * pow(v.denominator, -1, p) % p)
    return tuple(out)


def _lincomb(coeffs: Sequence[Fraction], mats: Sequence[Mat2], p: int) -> Mat2:
    acc = [Fraction(0)] * 4
    for c, mt in zip(coeffs, mats):
        for t in range(4):
            acc[t] += c * mt[t]
    return _mat_mod(acc, p)


@dataclass(frozen=True)
class HurwitzIso:
    """H/pH -> M_2(F_p) with i -> [[0,-1],[1,0]], j -> [[a,b],[b,-a]], a^2 + b^2 = -1."""

    p: int
    a: int
    b: int

    @property
    def ring(self) -> MatRing2:
        return MatRing2(self.p)

    @property
    def images(self) -> tuple[Mat2, Mat2, Mat2, Mat2]:
        p = self.p
        one = (1, 0, 0, 1)
        ii = (0, p - 1, 1, 0)
        jj = (self.a % p, self.b % p, self.b % p, (-self.a) % p)
        return one, ii, jj, self.ring.mul(ii, jj)

    def __call__(self, x: Quat) -> Mat2:
        return _lincomb(x.coords, self.images, self.p)


def hurwitz_iso(p: int) -> HurwitzIso:
    """Lexicographically least (a, b) in [0, p)^2 with a^2 + b^2 = -1 mod p."""
    if p == 2 or not isprime(p):
        raise ValueError("need an odd prime")
    for a in range(p):
        for b in range(p):
            if (a * a + b * b + 1) % p == 0:
                return HurwitzIso(p, a, b)
    raise AssertionError("unreachable for odd p")


def sqrt_minus_one(p: int) -> int:
    if p % 4 != 1:
        raise ValueError(f"{p} does not split in Z[i] (need p = 1 mod 4)")
    return next(u for u in range(2, p) if (u * u + 1) % p == 0)


@dataclass(frozen=True)
class LipschitzMap:
    """x + j y -> [[pi(x), -pi(conj y)], [pi(y), pi(conj x)]] with pi(i) = u.

    The matrix is multiplicative for the x + j y split (j z = conj(z) j), so
    a + bi + cj + dk has y = c - d i.
    """

    p: int
    u: int

    def __call__(self, q: Quat) -> Mat2:
        p, u = self.p, self.u
        a, b, c, d = q.coords
        x, xb = a + b * u, a - b * u
        y, yb = c - d * u, c + d * u
        return _mat_mod((x, -yb, y, xb), p)

    @property
    def images(self) -> tuple[Mat2, ...]:
        return tuple(self(e) for e in (ONE, I, J, K))


def _block_reduction(base: IntLattice, p: int, m: int, column_images: Sequence[Mat2]) -> Reduction:
    mat = [[0] * (4 * m) for _ in range(4 * m)]
    for blk in range(m):
        for e, img in enumerate(column_images):
            for r in range(4):
                mat[4 * blk + r][4 * blk + e] = img[r]
    return Reduction(base, p, 4 * m, tuple(tuple(r) for r in mat))


def lipschitz_reduction(p: int, m: int) -> Reduction:
    """L^m = Z^{4m} (coordinates a, b, c, d) onto M_2(F_p)^m, flattened to F_p^{4m}."""
    phi = LipschitzMap(p, sqrt_minus_one(p))
    return _block_reduction(IntLattice.identity(4 * m), p, m, phi.images)


def hurwitz_reduction(p: int, m: int) -> Reduction:
    """H^m (basis 1, i, j, omega; doubled Gram with scale 1/2) onto M_2(F_p)^m."""
    iso = hurwitz_iso(p)
    g = hurwitz_gram()
    gram = [[0] * (4 * m) for _ in range(4 * m)]
    for blk in range(m):
        for r in range(4):
            for c in range(4):
                gram[4 * blk + r][4 * blk + c] = g[r][c]
    eye = [[int(i == j) for j in range(4 * m)] for i in range(4 * m)]
    base = IntLattice(gram, Fraction(1, 2), eye)
    return _block_reduction(base, p, m, [iso(e) for e in HURWITZ_BASIS])


def lift_matrix_code(red: Reduction, code: FreeMatCode) -> IntLattice:
    """phi_p^{-1}(C); volume p^{4m} V(base) / |C|."""
    if code.p != red.p or 4 * code.m != red.n:
        raise ValueError("code does not match the reduction")
    return lift_code(red, code.to_linear_code())


def left_multiplication_matrix(u: Quat, order: str = "hurwitz") -> tuple[tuple[int, ...], ...]:
    """Rows are coordinates of u * e for each basis element e, so coords(u x) = coords(x) @ matrix."""
    if order == "hurwitz":
        return tuple(hurwitz_coords(u * e) for e in HURWITZ_BASIS)
    rows = []
    for e in (ONE, I, J, K):
        v = u * e
        if not v.is_lipschitz():
            raise ValueError("unit does not preserve the Lipschitz order")
        rows.append(tuple(int(c) for c in v.coords))
    return tuple(rows)


def act_on_vector(mat: Sequence[Sequence[int]], coords: Sequence[int]) -> tuple[int, ...]:
    """Apply a 4x4 coordinate action blockwise to a 4m-vector."""
    out = []
    for blk in range(len(coords) // 4):
        x = coords[4 * blk : 4 * blk + 4]
        out.extend(sum(x[i] * mat[i][j] for i in range(4)) for j in range(4))
    return tuple(out)


def noninvertible_norm_check(p: int, bound: int | None = None) -> dict:
    """Exhaustively confirm det phi_p(x + yj) = 0 mod p forces p | |x + yj|^2."""
    phi = LipschitzMap(p, sqrt_minus_one(p))
    ring = MatRing2(p)
    box = p if bound is None else min(bound, p)
    checked = noninv = 0
    counterexamples = []
    for a, b, c, d in itertools.product(range(box), repeat=4):
        q = Quat(a, b, c, d)
        checked += 1
        if ring.det(phi(q)) == 0:
            noninv += 1
            if q.sqnorm % p:
                counterexamples.append((a, b, c, d))
    return {"p": p, "checked": checked, "noninvertible": noninv, "counterexamples": counterexamples, "pass": not counterexamples}


def noninvertible_fiber_check(red: Reduction, lattice: IntLattice, order: str = "hurwitz") -> dict:
    """Every nonzero lifted vector shorter than sqrt(p) must have a unit coordinate image."""
    p = red.p
    ring = MatRing2(p)
    bad = []
    pts = points_in_ball(lattice, (p - 1e-9) ** 0.5)
    for pt in pts:
        if pt.sqnorm >= p:
            continue
        x = tuple(sum(c * lattice.basis[i][j] for i, c in enumerate(pt.coords)) for j in range(red.m))
        image = unflatten(red(x))
        if not any(ring.is_unit(mt) for mt in image):
            bad.append(x)
    return {"p": p, "checked": len(pts), "violations": bad, "pass": not bad}


def _centered_sqnorm(flat: Sequence[int], p: int) -> int:
    return sum(min(v, p - v) ** 2 for v in flat)


def balanced_check(p: int, m: int, k: int, seed: int = 0, n_random: int = 1) -> dict:
    """Membership tally and averaging bound for all free rank-k codes in M_2(F_p)^m.

    g* sums g over codewords having a unit coordinate; the bound compared is
    E[g*(C)] <= |R|^k / |(R^m)*| * g*(R^m).
    """
    ring = MatRing2(p)
    codes = enumerate_free_modules(p, m, k)
    vectors = list(itertools.product(range(p), repeat=4 * m))
    star = [v for v in vectors if any(ring.is_unit(x) for x in unflatten(v))]
    members = [c.elements() for c in codes]
    tally = {v: sum(v in e for e in members) for v in star}
    ls = set(tally.values())
    size = (p**4) ** k
    rng = np.random.default_rng(seed)

    def bound(g: Callable[[tuple[int, ...]], int]) -> dict:
        gstar_full = sum(Fraction(g(v)) for v in star)
        avg = sum(sum(Fraction(g(v)) for v in e if v in tally) for e in members) / len(codes)
        rhs = Fraction(size, len(star)) * gstar_full
        return {"lhs": avg, "rhs": rhs, "ratio": float(avg / rhs) if rhs else float("nan"), "ok": avg <= rhs}

    checks = {"ones": bound(lambda v: 1), "sqnorm": bound(lambda v: _centered_sqnorm(v, p))}
    for i in range(n_random):
        subset = {v for v in vectors if rng.random() < 0.5}
        checks[f"subset_{i}"] = bound(lambda v, s=subset: int(v in s))
    L = ls.pop() if len(ls) == 1 else None
    return {
        "p": p,
        "m": m,
        "k": k,
        "codes": len(codes),
        "code_size": size,
        "star_size": len(star),
        "L": L,
        "balanced": L is not None,
        "counting_identity": L is not None and size * len(codes) >= L * len(star),
        "bounds": checks,
        "bound_ok": all(c["ok"] for c in checks.values()),
    }
