from fractions import Fraction

import pytest

from conftest import cycle4, independent_users, path3, triangle, two_users
from oracles import cs_at_rate_oracle, rco_oracle
from skalc.capacity import (
    EAGER,
    LAZY,
    capacity_curve,
    cs_at_rate,
    cs_unconstrained,
    cs_vector_rate_upper_bound,
    gk_zero_rate,
    optimal_reduced_source,
    rco,
    rho_of_x,
    rs_at_key_rate,
)
from skalc.errors import InfeasibleRateError, SizeLimitError, ValidationError
from skalc.model import HypergraphSource, bits, cond_entropy
from skalc.partitions import validate
from skalc.verify import RandomEnsembleSpec, random_source

F = Fraction
h = F(1, 2)

# frozen from tests/oracles.py (basic-solution enumeration, no simplex)
RCO_CASES = [
    (triangle, F(3, 2)),
    (two_users, F(0)),
    (independent_users, F(5, 2)),
    (lambda: path3(active="13"), F(1)),
    (lambda: triangle(active="12"), F(1)),
    (cycle4, F(8, 3)),
]
CS_CASES = [
    (triangle, [(0, 0), (h, h), (1, 1), (F(3, 2), F(3, 2)), (2, F(3, 2))]),
    (two_users, [(0, 1), (1, 1)]),
    (lambda: path3(active="13"), [(0, 0), (h, h), (1, 1), (2, 1)]),
    (lambda: triangle(active="12"), [(0, 1), (h, F(3, 2)), (1, 2), (2, 2)]),
]


@pytest.mark.parametrize("method", [LAZY, EAGER])
@pytest.mark.parametrize("build,want", RCO_CASES)
def test_rco_frozen(build, want, method):
    omni = rco(build(), method)
    assert omni.value == want
    assert sum(omni.rates) == want


@pytest.mark.parametrize("method", [LAZY, EAGER])
@pytest.mark.parametrize("build,grid", CS_CASES)
def test_cs_at_rate_frozen(build, grid, method):
    src = build()
    for R, want in grid:
        assert cs_at_rate(src, R, method).value == want


def test_oracle_reproduces_frozen_triangle():
    edges = [(e.incidence, e.weight) for e in triangle().edges]
    assert rco_oracle(3, 7, edges) == F(3, 2)
    assert cs_at_rate_oracle(3, 7, edges, h) == h


def test_rco_dual_is_partition(tri):
    omni = rco(tri)
    assert validate(omni.dual, tri)
    assert omni.rates == (h, h, h)


def test_cs_unconstrained_values(tri):
    assert cs_unconstrained(tri) == F(3, 2)
    assert cs_unconstrained(two_users()) == 1
    assert cs_unconstrained(independent_users()) == 0
    assert cs_unconstrained(cycle4()) == F(4, 3)


def test_triangle_witness(tri):
    p = cs_at_rate(tri, 1)
    assert p.value == 1 and sum(p.witness_r) <= 1
    assert validate(p.witness_lambda, tri)
    # coverage of the dual cover is 1 + slope at every vertex
    for i in range(3):
        cov = sum(w for b, w in p.witness_lambda.weights.items() if b >> i & 1)
        assert cov == 1 + p.slope
    assert p.slope == 1


def test_witness_is_feasible_on_random_sources():
    spec = RandomEnsembleSpec(seed=3, count=25, n_range=(2, 5))
    for k in range(spec.count):
        src = random_source(spec, k)
        if bin(src.active).count("1") < 2:
            continue
        p = cs_at_rate(src, 1)
        r, x = p.witness_r, p.witness_x
        assert sum(r) <= 1 and p.value == sum(x) - sum(r)
        for b in range(1, 1 << src.n):
            if b & src.active != src.active:
                inside = sum((x[j] for j, e in enumerate(src.edges) if e.incidence & ~b == 0), F(0))
                assert sum((r[i] for i in bits(b)), F(0)) >= inside


def test_strict_rates_match():
    src = path3(active="13")
    for R in (0, h, 1):
        a, b = cs_at_rate(src, R), cs_at_rate(src, R, strict=True)
        assert a.value == b.value
        assert all(v >= 0 for v in b.witness_r)


def test_cs_concave_nondecreasing_on_grid():
    src = cycle4()
    grid = [F(k, 6) for k in range(0, 19)]
    vals = [cs_at_rate(src, R).value for R in grid]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    for k in range(1, len(vals) - 1):
        assert 2 * vals[k] >= vals[k - 1] + vals[k + 1]
    assert vals[-1] == F(4, 3)


def test_rejects_negative_rate(tri):
    with pytest.raises(ValidationError):
        cs_at_rate(tri, -1)


def test_rejects_single_active():
    with pytest.raises(ValidationError):
        rco(triangle(active="1"))


def test_too_many_vertices():
    names = [str(i) for i in range(17)]
    with pytest.raises(SizeLimitError):
        rco(HypergraphSource.build(names, [(names[:2], 1)]))


def test_gk_zero_rate():
    assert gk_zero_rate(triangle()) == 0
    assert gk_zero_rate(two_users()) == 1
    assert gk_zero_rate(triangle(active="12")) == 1
    src = triangle(active="12")
    assert gk_zero_rate(src) == cs_at_rate(src, 0).value


def test_rs_at_key_rate_triangle(tri):
    for rk in (0, h, 1, F(3, 2)):
        rate, point = rs_at_key_rate(tri, rk)
        assert rate == rk
        assert cs_at_rate(tri, rate).value >= rk
    with pytest.raises(InfeasibleRateError):
        rs_at_key_rate(tri, 2)


def test_rs_inverse_of_cs():
    src = cycle4()
    for rk in (0, F(1, 3), h, 1, F(4, 3)):
        rate, _ = rs_at_key_rate(src, rk)
        assert cs_at_rate(src, rate).value >= rk
        if rate > 0:
            # strictly less discussion cannot reach rk
            assert cs_at_rate(src, rate - F(1, 100)).value < rk


def test_curve_triangle(tri):
    curve = capacity_curve(tri)
    assert curve.breakpoints == ((0, 0), (F(3, 2), F(3, 2)))
    assert curve.slopes == (1,)
    assert curve.value_at(1) == 1 and curve.value_at(5) == F(3, 2)
    assert curve.saturation_rate == F(3, 2)


def test_curve_two_users():
    curve = capacity_curve(two_users())
    assert curve.breakpoints == ((0, 1),)
    assert curve.slopes == ()
    assert curve.value_at(3) == 1


def test_curve_matches_pointwise_and_is_concave():
    spec = RandomEnsembleSpec(seed=11, count=15, n_range=(3, 5))
    for k in range(spec.count):
        src = random_source(spec, k)
        if bin(src.active).count("1") < 2:
            continue
        curve = capacity_curve(src)
        s = curve.slopes
        assert all(a > b for a, b in zip(s, s[1:]))
        assert all(v > 0 for v in s)
        for (r0, _), (r1, _) in zip(curve.breakpoints, curve.breakpoints[1:]):
            mid = (r0 + r1) / 2
            assert curve.value_at(mid) == cs_at_rate(src, mid).value
        for R, c in curve.breakpoints:
            assert cs_at_rate(src, R).value == c


def test_rho_of_x(tri):
    assert rho_of_x(tri, (1, 1, 1)) == F(3, 2)
    assert rho_of_x(tri, (0, 0, 0)) == 0
    with pytest.raises(ValidationError):
        rho_of_x(tri, (2, 0, 0))
    with pytest.raises(ValidationError):
        rho_of_x(tri, (1, 1))


def test_optimal_reduced_source():
    src = cycle4()
    for R in (0, F(1, 3), 1, 2, 3):
        red = optimal_reduced_source(src, R)
        assert red.capacity == cs_at_rate(src, R).value
        assert red.omniscience_rate <= R
        assert all(0 <= x <= e.weight for x, e in zip(red.x, src.edges))


def test_vector_bound():
    tri = triangle()
    assert cs_vector_rate_upper_bound(tri, [None, None, None]) == F(3, 2)
    assert cs_vector_rate_upper_bound(tri, [0, 0, 0]) == 0
    # caps summing to R never beat the total-rate capacity
    for caps in ([h, h, 0], [1, 0, 0], [h, h, h]):
        assert cs_vector_rate_upper_bound(tri, caps) <= cs_at_rate(tri, sum(caps)).value
    with pytest.raises(ValidationError):
        cs_vector_rate_upper_bound(tri, [1, 1])


def test_adversary_reduction_used():
    src = HypergraphSource.build("123", [("12", 1), ("13", 1), ("23", 1)], "12", "3")
    # the untrusted helper is removed with its edges; only 12 remains
    assert rco(src).value == 0
    assert cs_unconstrained(src) == 1
    wt = HypergraphSource(triangle().vertices, triangle().edges, triangle().active, 0, frozenset({0}))
    assert cs_unconstrained(wt) == 1
    assert cond_entropy(wt, wt.everyone) == 3


def test_rho_of_reduced_triangle(tri):
    assert rho_of_x(tri, (F(2, 3),) * 3) == 1


def test_curve_single_spanning_edge():
    src = HypergraphSource.build("123", [("123", F(5, 2))])
    assert capacity_curve(src).breakpoints == ((0, F(5, 2)),)
    assert gk_zero_rate(src) == F(5, 2)


def test_inverse_consistency_both_ways():
    src = cycle4()
    for R in (0, F(1, 4), F(2, 3), 1, 2):
        k = cs_at_rate(src, R).value
        assert rs_at_key_rate(src, k)[0] <= R
    assert rs_at_key_rate(src, 0)[0] == 0


def test_reduced_source_at_zero_keeps_spanning_edges():
    src = HypergraphSource.build("123", [("12", 1), ("123", 2), ("3", 1)], "12")
    red = optimal_reduced_source(src, 0)
    # edges 12 and 123 both span A = {1, 2}; the singleton on 3 is dropped
    assert red.x == (1, 2, 0) and red.capacity == 3


def test_vector_bound_max_over_split_equals_total_rate(tri):
    R = F(3, 2)
    splits = [(F(a, 4), F(b, 4), R - F(a + b, 4)) for a in range(7) for b in range(7 - a)]
    best = max(cs_vector_rate_upper_bound(tri, s) for s in splits)
    assert best == cs_at_rate(tri, R).value


def test_lazy_equals_eager_up_to_eight_vertices():
    spec = RandomEnsembleSpec(seed=9, count=4, n_range=(7, 8), e_range=(3, 8), active="all")
    for k in range(spec.count):
        src = random_source(spec, k)
        assert rco(src, LAZY).value == rco(src, EAGER).value
        assert cs_at_rate(src, 1, LAZY).value == cs_at_rate(src, 1, EAGER).value
