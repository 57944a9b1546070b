"""Reductions phi_p: Lambda -> F_p^n, code lifts and kernel certificates.

A reduction is an n x m integer matrix M acting mod p on coordinates with
respect to the base lattice basis. Since p * Lambda lies in every lift, lifts
and kernels reduce to F_p linear algebra followed by a mod-p Hermite form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import isprime

from .galois import LinearCode, mat_vec_mod, nullspace_mod_p, rank_mod_p, rref, pivots
from .lattice import IntLattice, Matrix, congruence, det_int, mat_mul, shortest_vector

__all__ = [
    "Reduction",
    "KernelCert",
    "natural_reduction",
    "lift_code",
    "lift_subspace",
    "kernel_lattice",
    "normalize",
    "hnf",
    "non_degeneracy_table",
]


@dataclass(frozen=True)
class Reduction:
    base: IntLattice
    p: int
    n: int
    M: Matrix

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "M", tuple(tuple(int(v) % self.p for v in r) for r in self.M))
        if len(self.M) != self.n or any(len(r) != self.base.m for r in self.M):
            raise ValueError("M must be n x m")
        if self.n > self.base.m:
            raise ValueError("need n <= m")
        if rank_mod_p(self.M, self.p) != self.n:
            raise ValueError("reduction is not surjective (M has rank < n mod p)")

    @property
    def m(self) -> int:
        return self.base.m

    def __call__(self, coords: Sequence[int]) -> tuple[int, ...]:
        return mat_vec_mod(self.M, coords, self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "M": [list(r) for r in self.M], "base": self.base.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "Reduction":
        return cls(IntLattice.from_json(obj["base"]), obj["p"], obj["n"], tuple(tuple(r) for r in obj["M"]))


def natural_reduction(lat: IntLattice, p: int) -> Reduction:
    """phi_p(x_i) = e_i; the kernel is p * Lambda."""
    m = lat.m
    return Reduction(lat, p, m, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row Hermite normal form of a full-column-rank integer matrix.

    Upper triangular, positive diagonal, entries above each pivot in [0, pivot).
    """
    a = [list(r) for r in rows if any(r)]
    ncols = len(rows[0])
    out_rows = []
    for col in range(ncols):
        live = [r for r in a if r[col]]
        rest = [r for r in a if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        if not live:
            raise ValueError("matrix does not have full column rank")
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out_rows.append(piv)
        a = rest
    for i in range(len(out_rows)):
        d = out_rows[i][i]
        for j in range(i):
            q = out_rows[j][i] // d
            if q:
                out_rows[j] = [x - q * y for x, y in zip(out_rows[j], out_rows[i])]
    return tuple(tuple(r) for r in out_rows)


def _hnf_mod_p(subspace: Sequence[Sequence[int]], m: int, p: int) -> Matrix:
    """HNF of the lattice {x in Z^m : x mod p in W} for an F_p-subspace W."""
    red, _ = rref(subspace, p) if subspace else ((), 0)
    piv = pivots(red)
    by_col = dict(zip(piv, red))
    rows = []
    for j in range(m):
        if j in by_col:
            rows.append(tuple(by_col[j]))
        else:
            rows.append(tuple(p * int(i == j) for i in range(m)))
    return tuple(rows)


def lift_subspace(red: Reduction, code: LinearCode) -> Matrix:
    """Basis of phi_p^{-1}(C) in base coordinates (Hermite normal form)."""
    if code.p != red.p or code.n != red.n:
        raise ValueError(f"code over F_{code.p}^{code.n} does not match reduction onto F_{red.p}^{red.n}")
    h = code.parity_check()
    if h:
        constraint = mat_mul(h, red.M)
        w = nullspace_mod_p(constraint, red.m, red.p)
    else:
        w = tuple(tuple(int(i == j) for j in range(red.m)) for i in range(red.m))
    return _hnf_mod_p(w, red.m, red.p)


def lift_code(red: Reduction, code: LinearCode) -> IntLattice:
    """Lambda_p(C) = phi_p^{-1}(C), with basis rows in base coordinates."""
    basis = lift_subspace(red, code)
    det = det_int(basis)
    expected = red.p ** (red.n - code.k)
    if abs(det) != expected:
        raise AssertionError(f"lift index {abs(det)} != p^(n-k) = {expected}")
    return IntLattice(congruence(basis, red.base.gram), red.base.scale, basis)


@dataclass(frozen=True)
class KernelCert:
    lambda1_sq: Fraction
    gamma: float
    ratio: float
    theorem_bound: float | None = None
    theorem_ok: bool | None = None

    def as_dict(self) -> dict:
        return {
            "lambda1_sq": str(self.lambda1_sq),
            "gamma": self.gamma,
            "ratio": self.ratio,
            "theorem_bound": self.theorem_bound,
            "theorem_ok": self.theorem_ok,
        }


def kernel_lattice(
    red: Reduction, c: float = 1.0, alpha: float | None = None, k: int | None = None
) -> tuple[IntLattice, KernelCert]:
    """Kernel Lambda_p with its first minimum, Hermite parameter and lambda_1 / p^{n/m}.

    With alpha and k supplied, also checks lambda_1 >= c p^{(n-k)/m + alpha}.
    """
    ker = lift_code(red, LinearCode.zero(red.p, red.n))
    _, l1sq = shortest_vector(ker)
    l1 = math.sqrt(float(l1sq))
    m = red.m
    gamma = l1 / math.exp(ker.log_volume / m)
    ratio = l1 / red.p ** (red.n / m)
    bound = ok = None
    if alpha is not None and k is not None:
        bound = c * red.p ** ((red.n - k) / m + alpha)
        ok = l1 >= bound
    return ker, KernelCert(l1sq, gamma, ratio, bound, ok)


def non_degeneracy_table(make: callable, primes: Sequence[int]) -> dict:
    """Finite-p ratios lambda_1(Lambda_p)/p^{n/m} for reductions make(p).

    The family is flagged degenerate when log(ratio) falls against log(p)
    with slope below -n/(2m); a non-degenerate family has slope about 0.
    """
    rows = []
    for p in primes:
        red = make(p)
        _, cert = kernel_lattice(red)
        rows.append({"p": p, "lambda1_sq": str(cert.lambda1_sq), "gamma": cert.gamma, "ratio": cert.ratio})
    xs = [math.log(r["p"]) for r in rows]
    ys = [math.log(r["ratio"]) for r in rows]
    if len(rows) > 1:
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    else:
        slope = 0.0
    red = make(primes[0])
    return {"rows": rows, "slope": slope, "non_degenerate": slope > -red.n / (2 * red.m)}


def normalize(lat: IntLattice, v_target: float) -> tuple[IntLattice, float]:
    """beta * L with volume v_target, beta = (v_target / V(L))^{1/m}.

    The scale stays rational: it is the exact binary value of the float beta^2 * s.
    """
    if v_target <= 0:
        raise ValueError("target volume must be positive")
    log_beta = (math.log(v_target) - lat.log_volume) / lat.m
    beta = math.exp(log_beta)
    return lat.rescaled(Fraction(math.exp(2 * log_beta))), beta
