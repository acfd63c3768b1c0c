"""Hypergraphical sources and their entropy calculus.

A source is a hypergraph whose edges carry independent random variables;
user ``i`` observes every edge variable incident to it.  Subsets of users
are integer bitmasks over the canonical vertex order (bit ``k`` set means
``vertices[k]`` is in the subset), so all joint and conditional entropies
reduce to sums of edge weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError

Mask = int


def bits(mask: Mask) -> Iterator[int]:
    """Yield the vertex indices set in ``mask`` in increasing order."""
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def popcount(mask: Mask) -> int:
    return bin(mask).count("1")


def full_mask(n: int) -> Mask:
    return (1 << n) - 1


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ValidationError(f"refusing float {value!r}; use an exact rational")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse {value!r} as a rational") from exc


@dataclass(frozen=True)
class Edge:
    incidence: Mask
    weight: Fraction


@dataclass(frozen=True)
class HypergraphSource:
    """Users, weighted hyperedges, and the active/untrusted/wiretap designations.

    ``wiretap`` holds edge indices (0-based, in ``edges`` order) whose
    variables the wiretapper observes.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    active: Mask
    untrusted: Mask = 0
    wiretap: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.vertices)
        if len(set(self.vertices)) != n:
            raise ValidationError("vertex ids must be unique")
        everyone = full_mask(n)
        for k, e in enumerate(self.edges):
            if e.incidence == 0:
                raise ValidationError(f"edge {k} has an empty incidence set")
            if e.incidence & ~everyone:
                raise ValidationError(f"edge {k} is incident on unknown vertices")
            if e.weight < 0:
                raise ValidationError(f"edge {k} has negative entropy {e.weight}")
        if self.active == 0:
            raise ValidationError("the active set must be nonempty")
        if self.active & ~everyone or self.untrusted & ~everyone:
            raise ValidationError("active/untrusted sets must be subsets of the vertices")
        if self.active & self.untrusted:
            raise ValidationError("untrusted helpers cannot be active users")
        if any(not 0 <= k < len(self.edges) for k in self.wiretap):
            raise ValidationError("wiretap edge index out of range")

    @classmethod
    def build(
        cls,
        vertices: Sequence[str],
        edges: Iterable[tuple[Iterable[str], object]],
        active: Iterable[str] | None = None,
        untrusted: Iterable[str] = (),
        wiretap: Iterable[int] = (),
    ) -> "HypergraphSource":
        """Construct from vertex ids; ``active`` defaults to all vertices."""
        vertices = tuple(str(v) for v in vertices)
        index = {v: k for k, v in enumerate(vertices)}

        def to_mask(ids: Iterable[str], what: str) -> Mask:
            mask = 0
            for v in ids:
                v = str(v)
                if v not in index:
                    raise ValidationError(f"unknown vertex {v!r} in {what}")
                mask |= 1 << index[v]
            return mask

        built = tuple(
            Edge(to_mask(inc, f"edge {k}"), as_fraction(w)) for k, (inc, w) in enumerate(edges)
        )
        act = full_mask(len(vertices)) if active is None else to_mask(active, "active set")
        return cls(vertices, built, act, to_mask(untrusted, "untrusted set"), frozenset(wiretap))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def everyone(self) -> Mask:
        return full_mask(self.n)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(e.weight for e in self.edges)

    @property
    def has_adversaries(self) -> bool:
        return bool(self.untrusted or self.wiretap)

    def mask(self, ids: Iterable[str]) -> Mask:
        index = {v: k for k, v in enumerate(self.vertices)}
        out = 0
        for v in ids:
            if v not in index:
                raise ValidationError(f"unknown vertex {v!r}")
            out |= 1 << index[v]
        return out

    def names(self, mask: Mask) -> tuple[str, ...]:
        return tuple(self.vertices[k] for k in bits(mask))

    def with_weights(self, weights: Sequence[Fraction]) -> "HypergraphSource":
        if len(weights) != len(self.edges):
            raise ValidationError("weight vector length does not match the edge count")
        edges = tuple(Edge(e.incidence, as_fraction(w)) for e, w in zip(self.edges, weights))
        return HypergraphSource(self.vertices, edges, self.active, self.untrusted, self.wiretap)


def edges_within(source: HypergraphSource, subset: Mask) -> set[int]:
    """Indices of edges incident only on vertices in ``subset``."""
    return {k for k, e in enumerate(source.edges) if e.incidence & ~subset == 0}


def cond_entropy(source: HypergraphSource, subset: Mask) -> Fraction:
    """H(Z_B | Z_{V\\B}): total weight of the edges lying inside B."""
    return sum(
        (e.weight for e in source.edges if e.incidence & ~subset == 0), Fraction(0)
    )


def entropy(source: HypergraphSource, subset: Mask) -> Fraction:
    """H(Z_B): total weight of the edges touching B."""
    return sum((e.weight for e in source.edges if e.incidence & subset), Fraction(0))


def total_entropy(source: HypergraphSource) -> Fraction:
    return sum(source.weights, Fraction(0))


def inside_weight_table(n: int, edges: Sequence[tuple[Mask, object]], zero=Fraction(0)) -> list:
    """``table[B]`` = sum of weights of edges whose incidence lies in B, for all 2^n masks.

    Superset-sum (zeta) transform; ``n * 2^n`` additions.
    """
    table = [zero] * (1 << n)
    for inc, w in edges:
        table[inc] = table[inc] + w
    for k in range(n):
        bit = 1 << k
        for b in range(1 << n):
            if b & bit:
                table[b] = table[b] + table[b ^ bit]
    return table


def cond_entropy_table(source: HypergraphSource) -> list[Fraction]:
    return inside_weight_table(source.n, [(e.incidence, e.weight) for e in source.edges])


def _remap(mask: Mask, positions: dict[int, int]) -> Mask:
    out = 0
    for k in bits(mask):
        if k in positions:
            out |= 1 << positions[k]
    return out


def restrict(source: HypergraphSource, keep: Mask, new_active: Mask) -> HypergraphSource:
    """Sub-source on the vertices ``keep``; incidences are intersected with ``keep``.

    Edges that no longer touch any kept vertex are dropped.  Adversary
    designations are not carried over.
    """
    if keep & ~source.everyone:
        raise ValidationError("restriction set is not a subset of the vertices")
    if new_active == 0:
        raise ValidationError("restricted active set must be nonempty")
    if new_active & ~keep:
        raise ValidationError("restricted active set must lie inside the kept vertices")
    kept = list(bits(keep))
    positions = {old: new for new, old in enumerate(kept)}
    edges = tuple(
        Edge(_remap(e.incidence & keep, positions), e.weight)
        for e in source.edges
        if e.incidence & keep
    )
    return HypergraphSource(
        tuple(source.vertices[k] for k in kept), edges, _remap(new_active, positions)
    )


def reduce_for_adversaries(source: HypergraphSource) -> HypergraphSource:
    """Drop untrusted helpers, wiretapped edges, and every edge an untrusted helper sees.

    The result has no adversaries and the same secrecy capacity at every
    total discussion rate as ``source`` with its adversaries.
    """
    if source.active & ~source.untrusted == 0:
        raise ValidationError("no active users remain after removing untrusted helpers")
    if not source.has_adversaries:
        return source
    keep = source.everyone & ~source.untrusted
    kept = list(bits(keep))
    positions = {old: new for new, old in enumerate(kept)}
    edges = tuple(
        Edge(_remap(e.incidence, positions), e.weight)
        for k, e in enumerate(source.edges)
        if k not in source.wiretap and not e.incidence & source.untrusted
    )
    return HypergraphSource(
        tuple(source.vertices[k] for k in kept), edges, _remap(source.active, positions)
    )


def merge_parallel_edges(source: HypergraphSource) -> HypergraphSource:
    """Optional normalisation: combine edges with identical incidence sets.

    Only valid without wiretap designations, since those index edges.
    """
    if source.wiretap:
        raise ValidationError("cannot merge edges of a source with wiretap edge indices")
    merged: dict[Mask, Fraction] = {}
    for e in source.edges:
        merged[e.incidence] = merged.get(e.incidence, Fraction(0)) + e.weight
    edges = tuple(Edge(inc, w) for inc, w in merged.items())
    return HypergraphSource(source.vertices, edges, source.active, source.untrusted)
