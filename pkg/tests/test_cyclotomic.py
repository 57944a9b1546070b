import math

import pytest
from sympy import Matrix

from hlawka.cyclotomic import (
    CycField,
    craig_lattice,
    craig_parameter_schedule,
    ideal_reduction,
    k_successive_minima,
    minimal_vector_orbits,
    ring_of_integers,
    rogers_density_search,
    rogers_rhs,
    root_of_order,
    split_primes,
)
from hlawka.galois import LinearCode, sample_code
from hlawka.lattice import congruence, shortest_vector, successive_minima, theta_coefficients
from hlawka.reduction import kernel_lattice, lift_code
from oracles import box_points


def test_traces():
    fld = CycField(7)
    assert fld.trace(fld.one()) == 6
    assert fld.trace(fld.zeta_power(1)) == -1
    assert fld.trace(fld.zeta_power(6)) == -1
    x = fld.sub(fld.one(), fld.zeta_power(1))
    assert fld.trace_form(x, x) == 14


@pytest.mark.parametrize("q", [3, 5, 7, 11])
def test_discriminant(q):
    assert Matrix(CycField(q).power_basis_gram()).det() == q ** (q - 2)


@pytest.mark.parametrize("q", [5, 7])
def test_zeta_is_isometry(q):
    fld = CycField(q)
    t = fld.multiplication_matrix(fld.zeta_power(1))
    g = fld.power_basis_gram()
    assert congruence(t, g) == g


def test_craig_7_1_is_a6():
    lat = craig_lattice(7, 1)
    assert shortest_vector(lat)[1] == 2
    assert successive_minima(lat, 2) == [2, 2]
    a6 = [[2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(6)] for i in range(6)]
    oracle = {0: 1}
    for _, n in box_points(a6, 1, 8):
        oracle[n] = oracle.get(n, 0) + 1
    scaled = {int(k * lat.scale): v for k, v in theta_coefficients(lat, 8 * 7).items()}
    assert scaled == dict(sorted(oracle.items()))
    assert oracle[2] == 42


def test_craig_rejects_bad_parameters():
    with pytest.raises(ValueError):
        craig_lattice(7, 4)


def test_craig_schedule():
    assert craig_parameter_schedule(100) == round(100 / (2 * math.log(101)))
    assert craig_parameter_schedule(2) == 1


def test_split_primes():
    (p, g), = split_primes(5, 1)
    assert p == 11 and g in (3, 9, 5, 4)
    assert split_primes(7, 1)[0][0] == 29
    for p, g in split_primes(11, 5):
        assert pow(g, 11, p) == 1 and g % p != 1
    with pytest.raises(ValueError):
        root_of_order(5, 13)


def test_ideal_reduction_kernel():
    for q in (5, 7):
        for p, g in split_primes(q, 2):
            red = ideal_reduction(q, 1, p, g)
            ker, cert = kernel_lattice(red)
            assert math.isclose(ker.volume, p * ring_of_integers(q).volume)
            n = q - 1
            assert float(cert.lambda1_sq) >= n * p ** (2 / n) - 1e-9


def test_ideal_reduction_invalid():
    with pytest.raises(ValueError):
        ideal_reduction(5, 1, 13, 3)
    with pytest.raises(ValueError):
        ideal_reduction(5, 1, 11, 2)


def test_minimal_vectors_closed_under_roots_of_unity():
    red = ideal_reduction(5, 2, 11, 3)
    lat = lift_code(red, LinearCode(11, 2, 1, ((1, 4),)))
    count, closed = minimal_vector_orbits(lat, 5)
    assert closed and count % 10 == 0


def test_k_minima():
    lat = ring_of_integers(5, 1)
    km = k_successive_minima(lat, 5, 1)
    assert km.values == [shortest_vector(lat)[1]]
    two = ring_of_integers(5, 2)
    km = k_successive_minima(two, 5, 2)
    assert km.values == [4, 4]
    red = ideal_reduction(5, 2, 11, 3)
    lifted = lift_code(red, sample_code(11, 2, 1, 0))
    km = k_successive_minima(lifted, 5, 2)
    real = successive_minima(lifted, 2)
    assert km.values[0] == real[0] and km.values[1] >= real[1]


def test_rogers_closed_forms():
    assert math.isclose(rogers_rhs(5, 2, 0.5), 10 * 2 * 0.5 * __import__("hlawka").numerics.zeta(8) / (math.e * (1 - math.exp(-2)) * 2**8))


def test_rogers_search_pipeline():
    res = rogers_density_search(5, 2, [11], 1, trials=12, seed=0)
    assert len(res.rows) == 12
    assert math.isclose(res.threshold, 0.5 * 10 / 4)
    for row in res.acceptors:
        assert row["density_product_lhs"] >= row["rhs"]
    with pytest.raises(ValueError):
        rogers_density_search(5, 1, [11], 1)
