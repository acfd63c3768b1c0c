"""Fractional covers/partitions over subsets not containing the active set."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import DEFAULT_PARTITION_LIMIT, SizeLimitError, ValidationError
from .model import HypergraphSource, Mask, bits, cond_entropy_table, total_entropy

COVER, PARTITION = "cover", "partition"

# A set partition is a tuple of pairwise-disjoint nonempty block masks.
SetPartition = tuple


@dataclass(frozen=True)
class FractionalAssignment:
    """Sparse weights lambda(B) >= 0 on masks B with B not a superset of A."""

    weights: Mapping[Mask, Fraction]
    kind: str = PARTITION
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in (COVER, PARTITION):
            raise ValidationError(f"unknown assignment kind {self.kind!r}")
        object.__setattr__(
            self, "weights", {b: Fraction(w) for b, w in sorted(self.weights.items()) if w}
        )

    def __getitem__(self, mask: Mask) -> Fraction:
        return self.weights.get(mask, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def coverage(self, vertex: int) -> Fraction:
        bit = 1 << vertex
        return sum((w for b, w in self.weights.items() if b & bit), Fraction(0))

    def scaled(self, factor: Fraction, kind: str | None = None) -> "FractionalAssignment":
        return FractionalAssignment(
            {b: w * factor for b, w in self.weights.items()}, kind or self.kind, self.notes
        )


def validate(assignment: FractionalAssignment, source: HypergraphSource) -> bool:
    """Exact check of the cover/partition condition at every vertex."""
    A = source.active
    for b, w in assignment.weights.items():
        if w < 0 or b & ~source.everyone or b & A == A:
            return False
    for i in range(source.n):
        c = assignment.coverage(i)
        if assignment.kind == PARTITION and c != 1:
            return False
        if assignment.kind == COVER and c < 1:
            return False
    return True


def check_partition(blocks: Sequence[Mask], ground: Mask) -> SetPartition:
    seen = 0
    for blk in blocks:
        if blk == 0 or blk & seen or blk & ~ground:
            raise ValidationError("blocks must be nonempty, disjoint subsets of the ground set")
        seen |= blk
    if seen != ground:
        raise ValidationError("blocks do not cover the ground set")
    if len(blocks) < 2:
        raise ValidationError("a partition needs at least two blocks")
    return tuple(blocks)


def lambda_from_partition(partition: Sequence[Mask], source: HypergraphSource) -> FractionalAssignment:
    """lambda(V \\ C) = 1/(|P|-1) for each block C of P."""
    blocks = check_partition(partition, source.everyone)
    A = source.active
    for blk in blocks:
        if not blk & A:
            raise ValidationError("every block must meet the active set")
    w = Fraction(1, len(blocks) - 1)
    return FractionalAssignment({source.everyone & ~blk: w for blk in blocks}, PARTITION)


def lambda_from_weights(u: Sequence, source: HypergraphSource) -> FractionalAssignment:
    """lambda({i}) = lambda(V \\ {i}) = u_i / u(V) (colliding masks are summed).

    Positive weight is only admissible on active vertices, because
    V minus a helper still contains the active set.
    """
    u = [Fraction(v) for v in u]
    if len(u) != source.n or any(v < 0 for v in u):
        raise ValidationError("vertex weights must be a nonnegative vector over V")
    total = sum(u, Fraction(0))
    if total == 0:
        raise ValidationError("vertex weights must not all be zero")
    A = source.active
    weights: dict[Mask, Fraction] = {}
    for i, ui in enumerate(u):
        if not ui:
            continue
        if not A >> i & 1:
            raise ValidationError("vertex weights must vanish outside the active set")
        for b in (1 << i, source.everyone & ~(1 << i)):
            weights[b] = weights.get(b, Fraction(0)) + ui / total
    notes = ("singleton and complement masks coincide (|V| = 2); weights summed",) if source.n == 2 else ()
    return FractionalAssignment(weights, PARTITION, notes)


def i_lambda(source: HypergraphSource, assignment: FractionalAssignment) -> Fraction:
    """H(Z_V) - sum_B lambda(B) H(Z_B | Z_{V\\B})."""
    table = cond_entropy_table(source)
    return total_entropy(source) - sum(
        (w * table[b] for b, w in assignment.weights.items()), Fraction(0)
    )


def enumerate_partitions(ground: Mask | Sequence[int], limit: int = DEFAULT_PARTITION_LIMIT) -> Iterator[SetPartition]:
    """Every partition of ``ground`` into >= 2 blocks, via restricted growth strings.

    ``ground`` is a vertex mask (or a sequence of vertex indices).  Blocks
    come out as masks ordered by their smallest element.
    """
    items = list(bits(ground)) if isinstance(ground, int) else list(ground)
    if len(items) > limit:
        raise SizeLimitError(f"{len(items)} elements exceeds the partition limit of {limit}")
    n = len(items)
    growth = [0] * n

    def extend(pos: int, used: int) -> Iterator[SetPartition]:
        if pos == n:
            if used >= 2:
                blocks = [0] * used
                for k, g in enumerate(growth):
                    blocks[g] |= 1 << items[k]
                yield tuple(blocks)
            return
        for g in range(used + 1):
            growth[pos] = g
            yield from extend(pos + 1, max(used, g + 1))

    if n >= 2:
        yield from extend(0, 0)


def mmi(source: HypergraphSource, limit: int = DEFAULT_PARTITION_LIMIT) -> tuple[Fraction, SetPartition]:
    """Multivariate mutual information by enumerating all multi-block partitions.

    Requires no helpers (A = V).  Ties keep the first partition in
    enumeration order.
    """
    if source.active != source.everyone:
        raise ValidationError("mmi is defined for sources without helpers (A = V)")
    if source.n < 2:
        raise ValidationError("mmi needs at least two users")
    h_all = total_entropy(source)
    inside = cond_entropy_table(source)
    everyone = source.everyone
    best = None
    for part in enumerate_partitions(everyone, limit):
        # H(Z_C) = H(Z_V) - weight of edges inside V \ C
        split = sum((h_all - inside[everyone & ~c] for c in part), Fraction(0))
        value = (split - h_all) / (len(part) - 1)
        if best is None or value < best[0]:
            best = (value, part)
    return best
