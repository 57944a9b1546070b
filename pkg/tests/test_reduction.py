import itertools
import math
from fractions import Fraction

import pytest

from hlawka.galois import LinearCode, enumerate_codes, mat_vec_mod, rref
from hlawka.lattice import IntLattice, count_points, rational_inverse, shortest_vector
from hlawka.reduction import (
    Reduction,
    hnf,
    kernel_lattice,
    lift_code,
    natural_reduction,
    non_degeneracy_table,
    normalize,
)

A2 = IntLattice(((2, 1), (1, 2)))


def contains(basis, vec):
    inv = rational_inverse(basis)
    coeffs = [sum(Fraction(v) * inv[i][j] for i, v in enumerate(vec)) for j in range(len(basis))]
    return all(c.denominator == 1 for c in coeffs)


def test_natural_reduction_kernels():
    ker, cert = kernel_lattice(natural_reduction(IntLattice.identity(3), 7))
    assert cert.lambda1_sq == 49
    assert math.isclose(cert.ratio, 1.0)
    ker, _ = kernel_lattice(natural_reduction(A2, 5))
    assert math.isclose(ker.volume, 25 * A2.volume)
    assert sorted(ker.gram[i][i] for i in range(2)) == [50, 50]


def test_lift_full_and_zero():
    red = natural_reduction(A2, 3)
    assert lift_code(red, LinearCode.full(3, 2)).gram == A2.gram
    ker, _ = kernel_lattice(red)
    assert lift_code(red, LinearCode.zero(3, 2)).gram == ker.gram


def test_lift_example_z2():
    red = natural_reduction(IntLattice.identity(2), 3)
    lat = lift_code(red, LinearCode(3, 2, 1, ((1, 1),)))
    assert math.isclose(lat.volume, 3.0)
    assert shortest_vector(lat)[1] == 2
    assert contains(lat.basis, (1, 1)) and contains(lat.basis, (3, 0))
    assert not contains(lat.basis, (1, 0))


def test_lift_mismatch():
    red = natural_reduction(A2, 3)
    with pytest.raises(ValueError):
        lift_code(red, LinearCode.full(5, 2))


def test_not_surjective():
    with pytest.raises(ValueError):
        Reduction(A2, 3, 2, ((1, 1), (2, 2)))


@pytest.mark.parametrize("p,k", [(3, 1), (3, 2), (5, 1), (2, 2)])
def test_nesting_tower_and_image(p, k):
    base = IntLattice(((2, 1, 0), (1, 2, 1), (0, 1, 3)))
    red = Reduction(base, p, 2, ((1, 2, 0), (0, 1, 1)))
    ker, _ = kernel_lattice(red)
    for code in enumerate_codes(p, 2, k)[:6]:
        lat = lift_code(red, code)
        assert math.isclose(lat.volume, p ** (2 - k) * base.volume, rel_tol=1e-12)
        assert all(contains(lat.basis, row) for row in ker.basis)
        images = [mat_vec_mod(red.M, row, p) for row in lat.basis]
        assert all(code.contains(v) for v in images)
        assert rref(images, p)[1] == k
        # |lift / kernel| = p^k
        assert round(ker.volume / lat.volume) == p**k


def test_lift_matches_congruence_oracle():
    red = natural_reduction(IntLattice.identity(2), 5)
    code = LinearCode(5, 2, 1, ((1, 2),))
    lat = lift_code(red, code)
    for r in (2.0, 4.5, 7.0):
        direct = sum(
            1
            for x, y in itertools.product(range(-8, 9), repeat=2)
            if (x, y) != (0, 0) and x * x + y * y <= r * r and (2 * x - y) % 5 == 0
        )
        assert count_points(lat, r) == direct


def test_hnf_shape():
    h = hnf(((2, 4), (1, 3), (3, 0)))
    assert len(h) == 2
    assert abs(h[0][0] * h[1][1] - h[0][1] * h[1][0]) == 1  # gcd of the 2x2 minors 2, -12, -9


def test_kernel_theorem_check():
    _, cert = kernel_lattice(natural_reduction(IntLattice.identity(2), 11), c=1.0, alpha=0.1, k=1)
    assert cert.theorem_ok
    assert math.isclose(cert.theorem_bound, 11 ** (0.5 + 0.1))


def test_degenerate_family_flagged():
    # M annihilates e1 for every p, so e1 stays in every kernel
    def make(p):
        return Reduction(IntLattice.identity(2), p, 1, ((0, 1),))

    table = non_degeneracy_table(make, [5, 11, 23, 47])
    assert not table["non_degenerate"]
    assert all(r["lambda1_sq"] == "1" for r in table["rows"])
    good = non_degeneracy_table(lambda p: natural_reduction(IntLattice.identity(2), p), [5, 11, 23])
    assert good["non_degenerate"]


def test_normalize():
    lat, beta = normalize(IntLattice.identity(2), 4.0)
    assert math.isclose(beta, 2.0) and math.isclose(lat.volume, 4.0, rel_tol=1e-12)
    lifted = lift_code(natural_reduction(IntLattice.identity(2), 3), LinearCode(3, 2, 1, ((1, 1),)))
    lat, beta = normalize(lifted, 1.0)
    assert math.isclose(beta, 3**-0.5)
    assert math.isclose(lat.volume, 1.0, rel_tol=1e-12)


def test_reduction_json():
    red = natural_reduction(A2, 7)
    assert Reduction.from_json(red.to_json()) == red
