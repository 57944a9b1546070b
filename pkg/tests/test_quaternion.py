import itertools
import math
from fractions import Fraction

import pytest

from hlawka.galois import FreeMatCode, LinearCode, MatRing2, rank_mod_p
from hlawka.lattice import points_in_ball, shortest_vector
from hlawka.quaternion import (
    HURWITZ_BASIS,
    I,
    J,
    K,
    OMEGA,
    ONE,
    LipschitzMap,
    Quat,
    act_on_vector,
    balanced_check,
    from_hurwitz_coords,
    hurwitz_coords,
    hurwitz_gram,
    hurwitz_iso,
    hurwitz_reduction,
    hurwitz_units,
    left_multiplication_matrix,
    lift_matrix_code,
    lipschitz_reduction,
    lipschitz_units,
    noninvertible_fiber_check,
    noninvertible_norm_check,
    sqrt_minus_one,
)
from hlawka.reduction import lift_code

MINUS_I = (-1, 0, 0, -1)


def test_hamilton_product():
    assert I * J == K and J * I == -K
    assert I * I == -ONE
    assert OMEGA.sqnorm == 1
    x = Quat(1, 2, -1, 3)
    y = Quat(Fraction(1, 2), Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2))
    assert (x * y).sqnorm == x.sqnorm * y.sqnorm
    assert x * x.conj() == Quat(x.sqnorm, 0, 0, 0)


def test_units():
    assert len(lipschitz_units()) == 8
    units = hurwitz_units()
    assert len(units) == 24 and all(u.sqnorm == 1 and u.is_hurwitz() for u in units)
    assert not Quat(Fraction(1, 2), 0, 0, 0).is_hurwitz()


def test_hurwitz_coordinates_round_trip():
    for u in hurwitz_units() + [Quat(3, -1, 2, 5)]:
        assert from_hurwitz_coords(hurwitz_coords(u)) == u
    g = hurwitz_gram()
    for a, b in itertools.product(HURWITZ_BASIS, repeat=2):
        ca, cb = hurwitz_coords(a), hurwitz_coords(b)
        assert g[ca.index(1)][cb.index(1)] == 2 * sum(x * y for x, y in zip(a.coords, b.coords))


@pytest.mark.parametrize("p,ab", [(3, (1, 1)), (7, (2, 3)), (11, (1, 3))])
def test_hurwitz_iso_relations(p, ab):
    iso = hurwitz_iso(p)
    assert (iso.a, iso.b) == ab
    ring = iso.ring
    minus = tuple(v % p for v in MINUS_I)
    fi, fj = iso(I), iso(J)
    assert ring.mul(fi, fi) == minus and ring.mul(fj, fj) == minus
    assert ring.mul(fi, fj) == tuple((-v) % p for v in ring.mul(fj, fi))
    for u in hurwitz_units():
        assert ring.det(iso(u)) == u.sqnorm % p
    for x, y in itertools.product(hurwitz_units()[:8], repeat=2):
        assert iso(x * y) == ring.mul(iso(x), iso(y))


def test_hurwitz_iso_rejects_two():
    with pytest.raises(ValueError):
        hurwitz_iso(2)


def test_omega_image_and_surjectivity():
    iso = hurwitz_iso(5)
    assert iso.ring.det(iso(OMEGA)) == 1
    assert rank_mod_p([iso(e) for e in HURWITZ_BASIS], 5) == 4


def test_lipschitz_map():
    phi = LipschitzMap(5, sqrt_minus_one(5))
    assert phi.u == 2
    assert phi(I) == (2, 0, 0, 3)
    assert phi(ONE) == (1, 0, 0, 1)
    ring = MatRing2(5)
    for x, y in itertools.product(lipschitz_units(), repeat=2):
        assert phi(x * y) == ring.mul(phi(x), phi(y))
    with pytest.raises(ValueError):
        sqrt_minus_one(7)


def test_kernel_volumes():
    red = lipschitz_reduction(5, 1)
    assert math.isclose(lift_code(red, LinearCode.zero(5, 4)).volume, 5**4)
    hred = hurwitz_reduction(5, 1)
    assert math.isclose(hred.base.volume, 0.5)
    assert math.isclose(lift_code(hred, LinearCode.zero(5, 4)).volume, 5**4 * 0.5)
    full = FreeMatCode(5, 1, 1, (((1, 0, 0, 1),),))
    assert math.isclose(lift_matrix_code(hred, full).volume, 0.5)


@pytest.mark.parametrize("p", [5, 13])
def test_lemma1_exhaustive(p):
    rep = noninvertible_norm_check(p)
    assert rep["pass"] and rep["checked"] == p**4
    # the non-invertible classes are M_2(F_p) minus GL_2(F_p)
    assert rep["noninvertible"] == p**4 - (p * p - 1) * (p * p - p)


def test_lemma1_converse_spot_check():
    phi = LipschitzMap(5, 2)
    assert MatRing2(5).det(phi(Quat(1, 2, 0, 0))) == 0


def test_quaternionic_lift_unit_closure():
    p = 5
    red = hurwitz_reduction(p, 2)
    code = FreeMatCode(p, 2, 1, (((1, 0, 0, 1), (1, 0, 0, 1)),))
    lat = lift_matrix_code(red, code)
    assert math.isclose(lat.volume, p**8 * red.base.volume / code.cardinality)
    _, l1 = shortest_vector(lat)
    assert l1 == 2
    mins = set()
    for pt in points_in_ball(lat, math.sqrt(float(l1)) + 1e-9):
        if pt.sqnorm == l1:
            mins.add(tuple(sum(c * lat.basis[i][j] for i, c in enumerate(pt.coords)) for j in range(8)))
    assert len(mins) == 24
    for u in hurwitz_units():
        mat = left_multiplication_matrix(u)
        assert all(act_on_vector(mat, v) in mins for v in mins)
    assert noninvertible_fiber_check(red, lat)["pass"]


def test_left_multiplication_lipschitz():
    mat = left_multiplication_matrix(I, order="lipschitz")
    assert act_on_vector(mat, (0, 0, 1, 0)) == (0, 0, 0, 1)
    with pytest.raises(ValueError):
        left_multiplication_matrix(OMEGA, order="lipschitz")


def test_balanced_rings():
    rep = balanced_check(2, 2, 1, seed=3, n_random=10)
    assert rep["codes"] == 35 and rep["star_size"] == 156
    assert rep["balanced"] and rep["L"] == 1
    assert rep["bound_ok"]
    assert all(c["lhs"] <= c["rhs"] for c in rep["bounds"].values())
