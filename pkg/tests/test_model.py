from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import path3, triangle
from skalc.errors import ValidationError
from skalc.model import (
    HypergraphSource,
    as_fraction,
    bits,
    cond_entropy,
    cond_entropy_table,
    edges_within,
    entropy,
    merge_parallel_edges,
    reduce_for_adversaries,
    restrict,
)


def test_edges_within(tri):
    assert edges_within(tri, tri.mask("12")) == {0}
    assert edges_within(tri, 0) == set()
    assert edges_within(tri, tri.everyone) == {0, 1, 2}


def test_cond_entropy_and_entropy(tri):
    assert cond_entropy(tri, tri.mask("12")) == 1
    assert cond_entropy(tri, tri.mask("1")) == 0
    assert cond_entropy(tri, tri.everyone) == 3
    assert entropy(tri, tri.mask("1")) == 2
    assert entropy(tri, 0) == 0
    assert entropy(tri, tri.everyone) == 3


def test_table_matches_direct(tri):
    table = cond_entropy_table(tri)
    assert table == [cond_entropy(tri, b) for b in range(8)]


def test_bits_order():
    assert list(bits(0b1011)) == [0, 1, 3]


def test_exactness_guard():
    with pytest.raises(ValidationError):
        as_fraction(0.5)
    assert as_fraction("3/4") == Fraction(3, 4)


@pytest.mark.parametrize(
    "kwargs,msg",
    [
        (dict(vertices="11", edges=[]), "unique"),
        (dict(vertices="12", edges=[((), 1)]), "empty"),
        (dict(vertices="12", edges=[("12", -1)]), "negative"),
        (dict(vertices="12", edges=[("13", 1)]), "unknown"),
        (dict(vertices="123", edges=[], active="12", untrusted="2"), "untrusted"),
        (dict(vertices="12", edges=[("12", 1)], wiretap=[3]), "wiretap"),
    ],
)
def test_validation(kwargs, msg):
    with pytest.raises(ValidationError, match=msg):
        HypergraphSource.build(**kwargs)


def test_isolated_vertex_allowed():
    src = HypergraphSource.build("123", [("12", 1)])
    assert entropy(src, src.mask("3")) == 0


def test_reduce_identity(tri):
    assert reduce_for_adversaries(tri) is tri


def test_reduce_untrusted():
    src = triangle(active="12")
    src = HypergraphSource(src.vertices, src.edges, src.active, src.mask("3"))
    red = reduce_for_adversaries(src)
    assert red.vertices == ("1", "2")
    assert [(e.incidence, e.weight) for e in red.edges] == [(0b11, 1)]
    assert not red.has_adversaries


def test_reduce_wiretap(tri):
    src = HypergraphSource(tri.vertices, tri.edges, tri.active, 0, frozenset({0}))
    red = reduce_for_adversaries(src)
    assert red.vertices == tri.vertices
    assert [e.incidence for e in red.edges] == [tri.mask("13"), tri.mask("23")]


def test_reduce_idempotent():
    src = HypergraphSource.build("1234", [("12", 1), ("34", 2), ("13", 1)], "12", "4", [2])
    once = reduce_for_adversaries(src)
    assert reduce_for_adversaries(once) == once


def test_restrict_identity(tri):
    assert restrict(tri, tri.everyone, tri.active) == tri


def test_restrict_triangle(tri):
    sub = restrict(tri, tri.mask("12"), tri.mask("12"))
    assert [(sub.names(e.incidence), e.weight) for e in sub.edges] == [(("1", "2"), 1), (("1",), 1), (("2",), 1)]


def test_restrict_path():
    p = path3()
    sub = restrict(p, p.mask("13"), p.mask("13"))
    assert [sub.names(e.incidence) for e in sub.edges] == [("1",), ("3",)]


def test_restrict_rejects_empty_active(tri):
    with pytest.raises(ValidationError):
        restrict(tri, tri.mask("12"), 0)


def test_merge_parallel():
    src = HypergraphSource.build("12", [("12", 1), ("21", Fraction(1, 2))])
    merged = merge_parallel_edges(src)
    assert len(merged.edges) == 1 and merged.edges[0].weight == Fraction(3, 2)


@st.composite
def sources(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    names = [str(k) for k in range(n)]
    edges = draw(st.lists(
        st.tuples(st.sets(st.sampled_from(names), min_size=1),
                  st.fractions(min_value=0, max_value=3, max_denominator=4)),
        max_size=8))
    return HypergraphSource.build(names, [(sorted(s), w) for s, w in edges])


@settings(max_examples=40, deadline=None)
@given(sources())
def test_entropy_submodular_cond_supermodular(src):
    n = 1 << src.n
    h = [entropy(src, b) for b in range(n)]
    c = [cond_entropy(src, b) for b in range(n)]
    for b1 in range(n):
        for b2 in range(n):
            assert h[b1] + h[b2] >= h[b1 | b2] + h[b1 & b2]
            assert c[b1] + c[b2] <= c[b1 | b2] + c[b1 & b2]
        assert c[b1] <= h[b1] <= h[n - 1]
