import math
from fractions import Fraction

import pytest

from hlawka.config import CapExceeded
from hlawka.ensemble import (
    EnsembleSpec,
    average_sum_f,
    fiber_sums,
    integral_target,
    loeliger_lhs_rhs,
    loeliger_prediction,
    mh_radius,
    mh_search,
    theta_average,
)
from hlawka.functions import BallIndicator, Gaussian
from hlawka.galois import LinearCode, random_function
from hlawka.lattice import IntLattice, count_points, shortest_vector
from hlawka.numerics import unit_ball_volume, zeta
from hlawka.reduction import lift_code, natural_reduction, normalize


def zn_spec(m, p, k, **kw):
    return EnsembleSpec(natural_reduction(IntLattice.identity(m), p), k, **kw)


def test_loeliger_examples():
    assert loeliger_lhs_rhs(2, 2, 1, lambda v: 1) == (1, 1)
    ind = lambda v: int(v == (1, 0))
    assert loeliger_lhs_rhs(3, 2, 1, ind) == (Fraction(1, 4), Fraction(1, 4))


@pytest.mark.parametrize("p,n,k", [(2, 3, 2), (3, 3, 2), (5, 2, 1)])
def test_loeliger_random(p, n, k):
    for s in range(5):
        lhs, rhs = loeliger_lhs_rhs(p, n, k, random_function(p, n, s))
        assert isinstance(lhs, Fraction) and lhs == rhs


def test_spec_validation():
    with pytest.raises(ValueError):
        zn_spec(2, 3, 0)
    with pytest.raises(ValueError):
        zn_spec(2, 3, 1, mode="montecarlo", trials=10)
    with pytest.raises(CapExceeded):
        zn_spec(6, 11, 3, cap=1000)
    with pytest.raises(ValueError):
        EnsembleSpec.parse_mode(natural_reduction(IntLattice.identity(2), 3), 1, 1.0, "bogus:1:2")


def test_spec_json_and_beta():
    spec = EnsembleSpec.parse_mode(natural_reduction(IntLattice.identity(4), 11), 2, 1.0, "mc:20:42")
    assert EnsembleSpec.from_json(spec.to_json()) == spec
    assert math.isclose(spec.beta, 11 ** (-2 / 4))
    lat, beta = normalize(lift_code(spec.reduction, spec.codes()[0]), 1.0)
    assert math.isclose(beta, spec.beta)


def test_codes_are_reproducible():
    a = zn_spec(3, 5, 1, mode="montecarlo", trials=8, seed=7).codes()
    b = zn_spec(3, 5, 1, mode="montecarlo", trials=8, seed=7).codes()
    assert a == b


def test_empty_ball():
    spec = zn_spec(4, 2, 2)
    rep = average_sum_f(spec, BallIndicator(0.1 * spec.beta))
    assert rep.estimate == 0 and rep.exact == 0


def test_z2_exhaustive_example():
    spec = zn_spec(2, 3, 1)
    f = BallIndicator(2.0)
    rep = average_sum_f(spec, f)
    assert rep.exact == 12
    assert math.isclose(rep.kernel_term, 4) and math.isclose(rep.nonkernel_term, 8)
    assert math.isclose(rep.target, 4 * math.pi)
    assert math.isclose(loeliger_prediction(spec, f), 8)
    # oracle: count every lift directly at the scaled radius
    direct = [count_points(lift_code(spec.reduction, c), 2.0 / spec.beta) for c in spec.codes()]
    assert Fraction(sum(direct), len(direct)) == rep.exact


@pytest.mark.parametrize("p,r,primitive", [(3, 2.0, False), (5, 2.5, False), (7, 3.0, False), (5, 2.5, True)])
def test_exhaustive_equals_prediction_plus_kernel(p, r, primitive):
    spec = zn_spec(2, p, 1)
    f = BallIndicator(r)
    rep = average_sum_f(spec, f, primitive)
    assert math.isclose(rep.nonkernel_term, loeliger_prediction(spec, f, primitive), rel_tol=1e-12)
    assert math.isclose(rep.estimate, rep.kernel_term + rep.nonkernel_term)


def test_targets():
    assert math.isclose(integral_target(BallIndicator(1.2), 4, 1.0, True), unit_ball_volume(4) * 1.2**4 / zeta(4))
    assert math.isclose(integral_target(Gaussian(math.pi), 2, 2.0, False), 0.5)


def test_montecarlo_agrees_with_exhaustive():
    f = BallIndicator(2.2)
    exh = average_sum_f(zn_spec(3, 5, 1), f)
    mc = average_sum_f(zn_spec(3, 5, 1, mode="montecarlo", trials=600, seed=11), f)
    assert abs(mc.estimate - exh.estimate) <= 4 * mc.stderr


def test_threads_do_not_change_results():
    spec = zn_spec(3, 5, 1, mode="montecarlo", trials=30, seed=1)
    f = BallIndicator(1.5)
    assert average_sum_f(spec, f).samples == average_sum_f(spec, f, threads=4).samples


def test_theta_average():
    rep = theta_average(zn_spec(2, 3, 1), 2000.0)
    assert math.isclose(rep.estimate, 1.0)
    gaps = [abs(theta_average(zn_spec(2, p, 1), math.pi).estimate - 2) for p in (3, 11, 31)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_fiber_sums_split():
    red = natural_reduction(IntLattice.identity(2), 3)
    lat = lift_code(red, LinearCode(3, 2, 1, ((1, 1),)))
    s = fiber_sums(red, lat, BallIndicator(3.0), 1.0)
    # kernel 3Z^2 has the 4 points of norm 9 inside radius 3
    assert s.kernel_count == 4
    assert s.kernel_count + s.nonkernel_count == count_points(lat, 3.0)


def test_mh_radius():
    r = mh_radius(2, 1.0, 0.3, 2)
    assert math.isclose(math.pi * r * r, 2 * 0.7 * zeta(2))


def test_mh_search_small():
    spec = zn_spec(3, 11, 1)
    res = mh_search(spec, eps=0.3, L=2)
    assert res.found
    _, l1 = shortest_vector(res.lattice)
    assert l1 == res.lambda1_sq
    assert math.sqrt(float(l1)) * spec.beta > res.radius
    assert res.certified and res.density >= res.density_bound


@pytest.mark.parametrize("p", [3, 11, 31])
def test_theta_average_closed_form(p):
    # Poisson on Z^2 plus the fiber split give E[Theta(pi)] = 2p/(p+1) * Theta_{Z^2}(pi p)
    from hlawka.lattice import theta_series

    rep = theta_average(zn_spec(2, p, 1), math.pi)
    expected = 2 * p / (p + 1) * theta_series(IntLattice.identity(2), math.pi * p)
    assert math.isclose(rep.estimate, expected, rel_tol=1e-10)
