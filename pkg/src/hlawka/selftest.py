"""Quick per-module sanity checks exposed through the CLI `--selftest` flag."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

from . import cyclotomic as cyc
from . import effective as eff
from . import ensemble as ens
from . import galois as gal
from . import quaternion as qt
from . import reduction as red_
from .functions import BallIndicator
from .lattice import IntLattice, count_points, density_report, lll_gram, shortest_vector, successive_minima, theta_series

Check = tuple[str, Callable[[], bool]]


def _galois() -> list[Check]:
    eye = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    return [
        ("rref identity", lambda: gal.rref(eye, 5) == (eye, 3)),
        ("rref dependent rows", lambda: gal.rref(((1, 1), (2, 2)), 3) == (((1, 1),), 1)),
        ("sample full space", lambda: gal.sample_code(2, 2, 2, 7).gen == ((1, 0), (0, 1))),
        ("sample deterministic", lambda: gal.sample_code(5, 4, 2, 11) == gal.sample_code(5, 4, 2, 11)),
        ("one full-rank code", lambda: len(gal.enumerate_codes(3, 3, 3)) == 1),
        ("gaussian binomial k=0", lambda: gal.gaussian_binomial(5, 0, 7) == 1),
        ("one free module p=2 m=1", lambda: len(gal.enumerate_free_modules(2, 1, 1)) == 1),
    ]


def _lattice() -> list[Check]:
    z4 = IntLattice.identity(4)
    a2 = IntLattice(((2, -1), (-1, 2)))
    return [
        ("Z^4 volume", lambda: z4.volume == 1),
        ("scaling volume", lambda: math.isclose(z4.rescaled(Fraction(9, 4)).volume, 1.5**4)),
        ("LLL keeps reduced Gram", lambda: lll_gram(z4.gram)[0] == z4.gram),
        ("Z^n first minimum", lambda: shortest_vector(z4)[1] == 1),
        ("Z^3 minima", lambda: successive_minima(IntLattice.identity(3), 3) == [1, 1, 1]),
        ("diag(1,4) minima", lambda: successive_minima(IntLattice(((1, 0), (0, 4))), 2) == [1, 4]),
        ("empty small ball", lambda: count_points(a2, 1.0) == 0),
        ("theta at large tau", lambda: math.isclose(theta_series(a2, 200.0), 1.0)),
        ("Z^2 density", lambda: math.isclose(density_report(IntLattice.identity(2)).packing_density, math.pi / 4)),
    ]


def _reduction() -> list[Check]:
    z3 = IntLattice.identity(3)
    a2 = IntLattice(((2, -1), (-1, 2)))

    def kernel_a2():
        ker, _ = red_.kernel_lattice(red_.natural_reduction(a2, 5))
        return math.isclose(ker.volume, 25 * a2.volume)

    return _galois() + [
        ("Z^n kernel minimum", lambda: red_.kernel_lattice(red_.natural_reduction(z3, 7))[1].lambda1_sq == 49),
        ("kernel index p^n", kernel_a2),
        ("full code lifts to base", lambda: red_.lift_code(red_.natural_reduction(z3, 5), gal.LinearCode.full(5, 3)).volume == 1),
        ("Z^n ratio 1", lambda: math.isclose(red_.kernel_lattice(red_.natural_reduction(z3, 5))[1].ratio, 1.0)),
        ("normalize unit volume", lambda: math.isclose(red_.normalize(z3, 1.0)[1], 1.0)),
        ("normalize Z^2 to 4", lambda: math.isclose(red_.normalize(IntLattice.identity(2), 4.0)[1], 2.0)),
    ]


def _cyclotomic() -> list[Check]:
    fld = cyc.CycField(7)

    def split_ok():
        return all(pow(g, 5, p) == 1 and g % p != 1 for p, g in cyc.split_primes(5, 4))

    def t1_kernel():
        (p, g), = cyc.split_primes(5, 1)
        ker, _ = red_.kernel_lattice(cyc.ideal_reduction(5, 1, p, g))
        return math.isclose(ker.volume, p * cyc.ring_of_integers(5).volume)

    return [
        ("Tr(1) = q - 1", lambda: fld.trace(fld.one()) == 6),
        ("Tr(zeta) = -1", lambda: fld.trace(fld.zeta_power(1)) == -1),
        ("Craig schedule", lambda: cyc.craig_parameter_schedule(100) == round(100 / (2 * math.log(101)))),
        ("split primes have order-q roots", split_ok),
        ("t=1 ideal kernel index p", t1_kernel),
        ("acceptance threshold 2q/(q-1)", lambda: math.isclose(2 * 5 / 4, (2 * 5) / cyc.CycField(5).n)),
    ]


def _quaternion() -> list[Check]:
    def det_j(p):
        iso = qt.hurwitz_iso(p)
        return iso.ring.det(iso(qt.J)) == 1

    def lift_bounds():
        r = qt.hurwitz_reduction(5, 1)
        ker = red_.lift_code(r, gal.LinearCode.zero(5, 4))
        full = qt.lift_matrix_code(r, gal.FreeMatCode(5, 1, 1, (((1, 0, 0, 1),),)))
        return math.isclose(ker.volume, 5**4 * r.base.volume) and math.isclose(full.volume, r.base.volume)

    def balanced_ones():
        b = qt.balanced_check(2, 2, 1, seed=0, n_random=0)
        return b["bounds"]["ones"]["ok"]

    return [
        ("det phi(j) = 1", lambda: all(det_j(p) for p in (3, 5, 7, 11))),
        ("phi(1) = I", lambda: qt.LipschitzMap(5, 2)(qt.ONE) == (1, 0, 0, 1)),
        ("Lipschitz kernel p^4m", lambda: math.isclose(red_.lift_code(qt.lipschitz_reduction(5, 1), gal.LinearCode.zero(5, 4)).volume, 5**4)),
        ("zero and full lifts", lift_bounds),
        ("unit 1 is invertible", lambda: gal.MatRing2(5).det(qt.LipschitzMap(5, 2)(qt.ONE)) == 1),
        ("g = 1 cardinality bound", balanced_ones),
    ]


def _ensemble() -> list[Check]:
    def empty_ball():
        spec = ens.EnsembleSpec(red_.natural_reduction(IntLattice.identity(4), 2), 2)
        return ens.average_sum_f(spec, BallIndicator(0.1 * spec.beta)).estimate == 0

    def theta_large():
        spec = ens.EnsembleSpec(red_.natural_reduction(IntLattice.identity(2), 3), 1)
        rep = ens.theta_average(spec, 2000.0)
        return math.isclose(rep.estimate, 1.0) and math.isclose(rep.target, 1.0, abs_tol=1e-2)

    def mh_arith():
        r = ens.mh_radius(2, 1.0, 0.3, 2)
        from .numerics import zeta

        return math.isclose(math.pi * (r / 2) ** 2, 2 * 0.7 * zeta(2) / 4)

    return _galois() + [
        ("Loeliger g=1", lambda: ens.loeliger_lhs_rhs(2, 2, 1, lambda v: 1) == (1, 1)),
        ("empty ball average", empty_ball),
        ("theta at large tau", theta_large),
        ("MH certificate arithmetic", mh_arith),
        ("cyclotomic certificate bound", lambda: math.isclose(10 * 0.7 / 2**8, 0.02734375)),
    ]


def _effective() -> list[Check]:
    z2 = IntLattice.identity(2)

    def near_l0():
        s = eff.point_sandwich(z2, math.sqrt(2) / 2 + 1e-6)
        return s["lower"] < 1e-9 and s["ok"]

    def homogeneity():
        a = eff.point_sandwich(z2, 5.0)
        b = eff.point_sandwich(z2.rescaled(4), 10.0, 2 * a["l0"])
        return math.isclose(a["lower"], b["lower"]) and math.isclose(a["upper"], b["upper"]) and a["exact"] == b["exact"]

    def limit():
        d, _ = eff.density_bound(20, 20, 10, 10**12, 1.0, 0.3)
        return math.isclose(d, 0.7 / 2**19, rel_tol=1e-4)

    def table_ratio():
        rows = eff.table1_rows([1e8])
        return rows[3]["log_family"] / rows[0]["log_family"] < 0.2

    return [
        ("sandwich near l0", near_l0),
        ("sandwich homogeneity", homogeneity),
        ("density bound limit", limit),
        ("Craig/Construction A family ratio", table_ratio),
        ("Z^1 efficiency", lambda: math.isclose(eff.packing_efficiency_goal(IntLattice.identity(1))["ratio"], 1.0)),
    ]


GROUPS: dict[str, Callable[[], list[Check]]] = {
    "lattice": _lattice,
    "reduce": _reduction,
    "cyclo": _cyclotomic,
    "quat": _quaternion,
    "ensemble": _ensemble,
    "effective": _effective,
}


def run(group: str) -> list[dict]:
    out = []
    for name, fn in GROUPS[group]():
        try:
            ok, err = bool(fn()), None
        except Exception as exc:  # a crashing check is a failing check
            ok, err = False, f"{type(exc).__name__}: {exc}"
        out.append({"check": name, "ok": ok, "error": err})
    return out
