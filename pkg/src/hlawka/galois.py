"""Prime-field and 2x2 matrix-ring linear algebra, plus code ensembles.

Codes are always stored through their reduced row-echelon generator
matrix, which makes equality of codes equality of tuples.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import prod
from typing import Callable, Iterator, Sequence

import numpy as np
from sympy import isprime

from .config import DEFAULT_CODE_CAP, CapExceeded

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return pow(a, -1, self.p)


def rref(mat: Sequence[Sequence[int]], p: int) -> tuple[Matrix, int]:
    """Reduced row-echelon form over F_p; zero rows are dropped."""
    rows = [[v % p for v in r] for r in mat]
    if not rows:
        return (), 0
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        pr = next((i for i in range(pivot_row, len(rows)) if rows[i][col]), None)
        if pr is None:
            continue
        rows[pivot_row], rows[pr] = rows[pr], rows[pivot_row]
        inv = pow(rows[pivot_row][col], -1, p)
        rows[pivot_row] = [(v * inv) % p for v in rows[pivot_row]]
        piv = rows[pivot_row]
        for i in range(len(rows)):
            if i != pivot_row and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], piv)]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    out = tuple(tuple(r) for r in rows[:pivot_row])
    return out, pivot_row


def rank_mod_p(mat: Sequence[Sequence[int]], p: int) -> int:
    return rref(mat, p)[1]


def pivots(echelon: Matrix) -> list[int]:
    return [next(j for j, v in enumerate(row) if v) for row in echelon]


def nullspace_mod_p(mat: Sequence[Sequence[int]], ncols: int, p: int) -> Matrix:
    """Basis (as rows) of {x in F_p^ncols : mat @ x = 0}."""
    red, r = rref(mat, p) if mat else ((), 0)
    piv = pivots(red)
    free = [j for j in range(ncols) if j not in piv]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, pc in zip(red, piv):
            x[pc] = (-row[f]) % p
        basis.append(tuple(x))
    return tuple(basis)


def mat_vec_mod(mat: Sequence[Sequence[int]], vec: Sequence[int], p: int) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, vec)) % p for row in mat)


@dataclass(frozen=True)
class LinearCode:
    """An (n, k, p) code, gen is its RREF generator matrix."""

    p: int
    n: int
    k: int
    gen: Matrix

    @classmethod
    def from_generators(cls, rows: Sequence[Sequence[int]], p: int, n: int | None = None) -> "LinearCode":
        red, k = rref(rows, p)
        if n is None:
            n = len(rows[0])
        return cls(p, n, k, red)

    @classmethod
    def zero(cls, p: int, n: int) -> "LinearCode":
        return cls(p, n, 0, ())

    @classmethod
    def full(cls, p: int, n: int) -> "LinearCode":
        return cls(p, n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __post_init__(self):
        if len(self.gen) != self.k:
            raise ValueError("generator matrix must have k rows")
        if any(len(r) != self.n for r in self.gen):
            raise ValueError("generator rows must have length n")

    def codewords(self) -> Iterator[tuple[int, ...]]:
        for coeffs in itertools.product(range(self.p), repeat=self.k):
            yield tuple(
                sum(c * row[j] for c, row in zip(coeffs, self.gen)) % self.p for j in range(self.n)
            )

    def contains(self, v: Sequence[int]) -> bool:
        v = [x % self.p for x in v]
        return rref(list(self.gen) + [v], self.p)[1] == self.k

    def parity_check(self) -> Matrix:
        return nullspace_mod_p(self.gen, self.n, self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "k": self.k, "gen": [list(r) for r in self.gen]}

    @classmethod
    def from_json(cls, obj: dict) -> "LinearCode":
        code = cls.from_generators(obj["gen"], obj["p"], obj["n"]) if obj["gen"] else cls.zero(obj["p"], obj["n"])
        if code.k != obj["k"]:
            raise ValueError(f"generator rank {code.k} does not match k={obj['k']}")
        return code

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    num = prod(p**n - p**i for i in range(k))
    den = prod(p**k - p**i for i in range(k))
    return num // den


def sample_code(p: int, n: int, k: int, seed) -> LinearCode:
    """Uniform k-dimensional subspace of F_p^n.

    Every subspace has the same number of full-rank k x n generator
    matrices, so rejection sampling on i.i.d. uniform matrices is exact.
    ``seed`` may be an int, a sequence of ints, or a numpy Generator.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        mat = rng.integers(0, p, size=(k, n)).tolist()
        red, r = rref(mat, p)
        if r == k:
            return LinearCode(p, n, k, red)


def _rref_with_pivots(p: int, n: int, piv: tuple[int, ...]) -> Iterator[Matrix]:
    k = len(piv)
    pivset = set(piv)
    free_slots = [(i, j) for i, c in enumerate(piv) for j in range(c + 1, n) if j not in pivset]
    for values in itertools.product(range(p), repeat=len(free_slots)):
        rows = [[0] * n for _ in range(k)]
        for i, c in enumerate(piv):
            rows[i][c] = 1
        for (i, j), v in zip(free_slots, values):
            rows[i][j] = v
        yield tuple(tuple(r) for r in rows)


def iter_codes(p: int, n: int, k: int) -> Iterator[LinearCode]:
    for piv in itertools.combinations(range(n), k):
        for gen in _rref_with_pivots(p, n, piv):
            yield LinearCode(p, n, k, gen)


def enumerate_codes(p: int, n: int, k: int, cap: int = DEFAULT_CODE_CAP) -> list[LinearCode]:
    """All k-dimensional subspaces of F_p^n, each once, in canonical form."""
    total = gaussian_binomial(n, k, p)
    if total > cap:
        raise CapExceeded(f"{total} codes exceed the enumeration cap {cap}", estimate=total)
    return list(iter_codes(p, n, k))


# --- M_2(F_p) ----------------------------------------------------------------

Mat2 = tuple[int, int, int, int]  # row-major (a, b, c, d) for [[a, b], [c, d]]


@dataclass(frozen=True)
class MatRing2:
    p: int

    def elements(self) -> list[Mat2]:
        return [tuple(e) for e in itertools.product(range(self.p), repeat=4)]

    def mul(self, x: Mat2, y: Mat2) -> Mat2:
        a, b, c, d = x
        e, f, g, h = y
        p = self.p
        return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)

    def add(self, x: Mat2, y: Mat2) -> Mat2:
        return tuple((u + v) % self.p for u, v in zip(x, y))

    def det(self, x: Mat2) -> int:
        return (x[0] * x[3] - x[1] * x[2]) % self.p

    def is_unit(self, x: Mat2) -> bool:
        return self.det(x) != 0

    @property
    def one(self) -> Mat2:
        return (1, 0, 0, 1)

    @property
    def units(self) -> list[Mat2]:
        return [x for x in self.elements() if self.is_unit(x)]

    @property
    def matrix_units(self) -> list[Mat2]:
        return [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]


def flatten(vec: Sequence[Mat2]) -> tuple[int, ...]:
    return tuple(e for x in vec for e in x)


def unflatten(flat: Sequence[int]) -> tuple[Mat2, ...]:
    return tuple(tuple(flat[i : i + 4]) for i in range(0, len(flat), 4))


@dataclass(frozen=True)
class FreeMatCode:
    """Free left submodule of M_2(F_p)^m with k generators."""

    p: int
    m: int
    k: int
    gens: tuple[tuple[Mat2, ...], ...]

    def span_rows(self) -> list[tuple[int, ...]]:
        ring = MatRing2(self.p)
        return [flatten(tuple(ring.mul(e, x) for x in g)) for g in self.gens for e in ring.matrix_units]

    def to_linear_code(self) -> LinearCode:
        """The same set viewed as an F_p-subspace of F_p^{4m}."""
        rows = self.span_rows()
        if not rows:
            return LinearCode.zero(self.p, 4 * self.m)
        return LinearCode.from_generators(rows, self.p, 4 * self.m)

    def is_free(self) -> bool:
        return self.to_linear_code().k == 4 * self.k

    @property
    def cardinality(self) -> int:
        return self.p ** self.to_linear_code().k

    def elements(self) -> set[tuple[int, ...]]:
        return set(self.to_linear_code().codewords())

    def contains(self, flat: Sequence[int]) -> bool:
        return self.to_linear_code().contains(flat)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "k": self.k, "gens": [[list(x) for x in g] for g in self.gens]}

    @classmethod
    def from_json(cls, obj: dict) -> "FreeMatCode":
        gens = tuple(tuple(tuple(x) for x in g) for g in obj["gens"])
        code = cls(obj["p"], obj["m"], obj["k"], gens)
        if not code.is_free():
            raise ValueError("generators do not span a free module of the stated rank")
        return code


def enumerate_free_modules(p: int, m: int, k: int, cap: int = DEFAULT_CODE_CAP) -> list[FreeMatCode]:
    """Every free rank-k left submodule of M_2(F_p)^m, exactly once.

    Generator tuples are scanned in lexicographic order of their flattened
    entries, so the tuple kept for each module is its lex-least generator.
    """
    scan = p ** (4 * m * k)
    if scan > cap:
        raise CapExceeded(f"scanning {scan} generator tuples exceeds cap {cap}", estimate=scan)
    seen: dict[Matrix, FreeMatCode] = {}
    for flat in itertools.product(range(p), repeat=4 * m * k):
        gens = tuple(unflatten(flat[i * 4 * m : (i + 1) * 4 * m]) for i in range(k))
        code = FreeMatCode(p, m, k, gens)
        lc = code.to_linear_code()
        if lc.k != 4 * k or lc.gen in seen:
            continue
        seen[lc.gen] = code
    return list(seen.values())


def random_function(p: int, n: int, seed, low: int = -10, high: int = 10) -> Callable[[tuple[int, ...]], int]:
    """Integer-valued table g: F_p^n -> Z, reproducible from seed."""
    rng = np.random.default_rng(seed)
    table = {v: int(rng.integers(low, high + 1)) for v in itertools.product(range(p), repeat=n)}
    return table.__getitem__
