import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hlawka.config import CapExceeded
from hlawka.functions import BallIndicator, Gaussian, RogersStepLog
from hlawka.lattice import (
    IntLattice,
    congruence,
    count_points,
    density_report,
    is_lll_reduced,
    lll_gram,
    lll_reduce,
    point_bounds,
    points_in_ball,
    shortest_vector,
    successive_minima,
    sum_test_function,
    theta_coefficients,
    theta_series,
)
from oracles import box_count, box_min, box_points

A2 = IntLattice(((2, 1), (1, 2)))
D4 = IntLattice(((2, 0, 0, -1), (0, 2, 0, 1), (0, 0, 2, 1), (-1, 1, 1, 2)))


def random_unimodular(m, rng, steps=12):
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    for _ in range(steps):
        i, j = rng.sample(range(m), 2)
        c = rng.choice([-2, -1, 1, 2])
        u[i] = [a + c * b for a, b in zip(u[i], u[j])]
    return u


def test_volume():
    assert IntLattice.identity(4).volume == 1
    assert math.isclose(A2.volume, math.sqrt(3))
    assert math.isclose(A2.rescaled(Fraction(9, 4)).volume, math.sqrt(3) * 1.5**2)


def test_rejects_indefinite():
    with pytest.raises(ValueError):
        IntLattice(((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        IntLattice(((1, 0), (1, 1)))


def test_lll_examples():
    eye = IntLattice.identity(3).gram
    assert lll_gram(eye)[0] == eye
    basis = ((1, 0), (10, 1))
    red, u = lll_gram(congruence(basis, ((1, 0), (0, 1))))
    assert red == ((1, 0), (0, 1))
    rng = random.Random(5)
    u = random_unimodular(2, rng)
    scrambled = IntLattice(congruence(u, A2.gram))
    red = lll_reduce(scrambled)
    assert sorted(red.gram[i][i] for i in range(2)) == [2, 2]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_lll_output_is_reduced_and_equivalent(seed):
    rng = random.Random(seed)
    m = rng.randint(2, 5)
    u = random_unimodular(m, rng)
    g = congruence(u, D4.gram if m == 4 else IntLattice.identity(m).gram)
    red, t = lll_gram(g)
    assert is_lll_reduced(red)
    assert congruence(t, g) == red


def test_shortest_vector_examples():
    pt, l1 = shortest_vector(IntLattice.identity(5))
    assert l1 == 1 and pt.coords == (0, 0, 0, 0, 1)
    assert shortest_vector(A2)[1] == 2
    assert shortest_vector(D4)[1] == 2
    assert shortest_vector(IntLattice(((2, -1), (-1, 2))))[1] == 2


def test_shortest_vector_tie_break_is_basis_invariant_in_value():
    pt, _ = shortest_vector(A2)
    first = next(c for c in pt.coords if c)
    assert first > 0
    minimizers = sorted(x for x, n in box_points(A2.gram, 1, 2) if n == 2 and next(c for c in x if c) > 0)
    assert pt.coords == minimizers[0]


def test_rank_cap():
    with pytest.raises(CapExceeded):
        shortest_vector(IntLattice.identity(5), rank_cap=4)


def test_successive_minima():
    assert successive_minima(IntLattice.identity(3), 3) == [1, 1, 1]
    assert successive_minima(IntLattice(((1, 0), (0, 4))), 2) == [1, 4]
    assert successive_minima(A2, 2) == [2, 2]


def test_count_points_examples():
    z2 = IntLattice.identity(2)
    assert count_points(z2, 2.5) == 20
    assert count_points(z2, 2.5, primitive_only=True) == 16
    assert count_points(A2, 1.2) == 0


def test_count_points_cap_reports_bounds():
    with pytest.raises(CapExceeded) as exc:
        count_points(IntLattice.identity(4), 30, cap=1000)
    lo, hi = exc.value.estimate
    assert lo < hi


def test_mobius_relation_on_z2():
    z2 = IntLattice.identity(2)
    for r in (3.0, 5.5, 10.0):
        total = count_points(z2, r)
        prim = sum(count_points(z2, r / j, primitive_only=True) for j in range(1, int(r) + 1))
        assert total == prim


def test_theta_examples():
    z1 = IntLattice.identity(1)
    direct = 1 + 2 * sum(math.exp(-math.pi * n * n) for n in range(1, 30))
    assert math.isclose(theta_series(z1, math.pi), direct, abs_tol=1e-10)
    assert math.isclose(direct, 1.0864348112, abs_tol=1e-9)
    assert math.isclose(theta_series(A2, 500.0), 1.0, abs_tol=1e-12)
    beta2 = Fraction(9, 4)
    assert math.isclose(theta_series(A2, 1.3), theta_series(A2.rescaled(beta2), 1.3 / 2.25), abs_tol=1e-9)
    assert theta_series(D4, 0.5) > theta_series(D4, 0.6)


def test_theta_coefficients_z2():
    coeffs = theta_coefficients(IntLattice.identity(2), 5)
    assert coeffs == {0: 1, 1: 4, 2: 4, 4: 4, 5: 8}


def test_density_examples():
    assert math.isclose(density_report(IntLattice.identity(2)).packing_density, math.pi / 4)
    assert math.isclose(density_report(A2).packing_density, math.pi / (2 * math.sqrt(3)))
    assert math.isclose(density_report(D4).packing_density, math.pi**2 / 16)


def test_density_basis_invariance():
    rng = random.Random(3)
    u = random_unimodular(4, rng)
    other = IntLattice(congruence(u, D4.gram))
    a, b = density_report(D4, 4), density_report(other, 4)
    assert a.lambda1_sq == b.lambda1_sq
    assert math.isclose(a.packing_density, b.packing_density)
    assert a.successive_densities == pytest.approx(b.successive_densities)


def test_sum_test_function_definitions():
    assert sum_test_function(D4, BallIndicator(2.0)) == count_points(D4, 2.0)
    assert sum_test_function(D4, BallIndicator(2.0), True) == count_points(D4, 2.0, True)
    assert math.isclose(sum_test_function(D4, Gaussian(1.1)), theta_series(D4, 1.1) - 1, abs_tol=1e-9)
    assert sum_test_function(IntLattice.identity(1), RogersStepLog(0.3, 1, 1)) == 0


def test_rogers_integral_by_quadrature():
    f = RogersStepLog(1.0, 1, 1)
    assert math.isclose(f.integral(1), 2 * (math.e - 1))
    steps = 200000
    h = f.support_radius / steps
    quad = 2 * h * sum(f.value_sq(((i + 0.5) * h) ** 2) for i in range(steps))
    assert math.isclose(quad, f.integral(1), rel_tol=1e-6)


def test_semi_admissible_decay_constants():
    for f, m in ((Gaussian(0.7), 3), (BallIndicator(1.5), 3), (RogersStepLog(1.0, 2, 2), 4)):
        b, delta = f.decay_constants(m)
        for x in [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0]:
            assert abs(f.value_sq(x * x)) <= b / (1 + x) ** (m + delta) + 1e-12


def test_point_bounds_sandwich():
    for lat in (IntLattice.identity(3), A2, D4):
        for r in (3.0, 4.5):
            lo, hi = point_bounds(lat, r)
            n = count_points(lat, r) + 1
            assert lo <= n <= hi


def random_gram(rng, m):
    while True:
        a = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(m)]
        g = [[a[i][j] if i <= j else a[j][i] for j in range(m)] for i in range(m)]
        try:
            return IntLattice(g)
        except ValueError:
            continue


@pytest.mark.parametrize("seed", range(12))
def test_oracle_equivalence(seed):
    rng = random.Random(seed)
    lat = random_gram(rng, rng.randint(1, 4))
    _, l1 = shortest_vector(lat)
    assert l1 == box_min(lat.gram, lat.scale)
    r = math.sqrt(float(l1)) * 1.9
    assert count_points(lat, r) == box_count(lat.gram, lat.scale, r)
    assert count_points(lat, r, True) == box_count(lat.gram, lat.scale, r, True)


def test_points_sorted_and_exact():
    pts = points_in_ball(D4, 2.0)
    assert [p.sqnorm for p in pts] == sorted(p.sqnorm for p in pts)
    assert all(p.sqnorm == D4.sqnorm(p.coords) for p in pts)
    assert len(pts) == 24 + 24


def test_json_round_trip():
    lat = A2.rescaled(Fraction(1, 3))
    assert IntLattice.from_json(lat.to_json()) == lat
