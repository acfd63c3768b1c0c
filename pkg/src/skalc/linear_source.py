"""Finite linear sources over GF(2), with entropies given by matrix rank.

A row is an int bit-vector over the base bits (bit j is X_j), so a matrix
is a tuple of ints.  Observations, auxiliary variables W and stacks of
them are all such row tuples.  Auxiliary W is limited to deterministic
linear functions of the base bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .capacity import LAZY, omniscience_program
from .errors import ValidationError, check_vertex_count
from .model import HypergraphSource, Mask, bits, full_mask, popcount

Matrix = tuple[int, ...]
ZERO = Fraction(0)


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) by xor elimination against a pivot-indexed basis."""
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in basis:
                basis[top] = row
                break
            row ^= basis[top]
    return len(basis)


def span(rows: Iterable[int]) -> frozenset[int]:
    space = {0}
    for row in rows:
        if row not in space:
            space |= {v ^ row for v in space}
    return frozenset(space)


@dataclass(frozen=True)
class LinearSource:
    """Users observe Z_i = M_i X for a vector X of m uniform independent bits."""

    m: int
    users: tuple[str, ...]
    matrices: tuple[Matrix, ...]
    active: Mask
    wiretap: Matrix | None = None

    def __post_init__(self):
        if self.m < 0:
            raise ValidationError("base dimension must be nonnegative")
        n = len(self.users)
        if len(set(self.users)) != n:
            raise ValidationError("user ids must be unique")
        if len(self.matrices) != n:
            raise ValidationError("one observation matrix per user is required")
        for mat in self.matrices + ((self.wiretap,) if self.wiretap else ()):
            _check_rows(mat, self.m)
        if self.active == 0 or self.active & ~full_mask(n):
            raise ValidationError("active set must be a nonempty subset of the users")

    @classmethod
    def build(cls, m: int, observers: dict, active: Iterable[str] | None = None, wiretap=None) -> "LinearSource":
        """``observers`` maps user id -> rows (ints or 0/1 strings, leftmost char = X_0)."""
        users = tuple(str(u) for u in observers)
        mats = tuple(tuple(parse_row(r, m) for r in observers[u]) for u in observers)
        index = {u: k for k, u in enumerate(users)}
        if active is None:
            act = full_mask(len(users))
        else:
            act = 0
            for u in active:
                if str(u) not in index:
                    raise ValidationError(f"unknown user {u!r} in active set")
                act |= 1 << index[str(u)]
        wt = None if wiretap is None else tuple(parse_row(r, m) for r in wiretap)
        return cls(m, users, mats, act, wt)

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def everyone(self) -> Mask:
        return full_mask(self.n)

    def stack(self, subset: Mask) -> Matrix:
        return tuple(row for i in bits(subset) for row in self.matrices[i])


def parse_row(row, m: int) -> int:
    if isinstance(row, str):
        if len(row) != m or set(row) - {"0", "1"}:
            raise ValidationError(f"row {row!r} is not a length-{m} 0/1 string")
        return sum(1 << j for j, ch in enumerate(row) if ch == "1")
    if isinstance(row, bool) or not isinstance(row, int):
        raise ValidationError(f"row {row!r} must be an int bit-vector or a 0/1 string")
    _check_rows((row,), m)
    return row


def _check_rows(rows: Sequence[int], m: int) -> None:
    for r in rows:
        if r < 0 or r >> m:
            raise ValidationError(f"row {r} does not fit in {m} columns")


def rank_entropy(src: LinearSource, stack: Sequence[Matrix]) -> Fraction:
    """H of the stacked observations in bits: the GF(2) rank of the stack."""
    rows = [r for mat in stack for r in mat]
    _check_rows(rows, src.m)
    return Fraction(gf2_rank(rows))


def _no_wiretap(src: LinearSource) -> None:
    if src.wiretap is not None:
        raise ValidationError("wiretapped linear sources are not supported by the exact solvers")


def _rank_table(src: LinearSource, extra: Matrix = ()) -> list[int]:
    """rank(Z_S, extra) for every mask S."""
    return [gf2_rank(src.stack(s) + tuple(extra)) for s in range(1 << src.n)]


def cond_entropy_table(src: LinearSource) -> list[Fraction]:
    """H(Z_B | Z_{V\\B}) = rank(Z_V) - rank(Z_{V\\B}) for every mask B."""
    ranks = _rank_table(src)
    full = src.everyone
    return [Fraction(ranks[full] - ranks[full & ~b]) for b in range(1 << src.n)]


def info_table(src: LinearSource, W: Matrix) -> list[Fraction]:
    """I(W ^ Z_B | Z_{V\\B}) = H(W | Z_{V\\B}) - H(W | Z_V) for every mask B."""
    _check_rows(W, src.m)
    plain = _rank_table(src)
    joint = _rank_table(src, W)
    full = src.everyone

    def given(s):
        return joint[s] - plain[s]

    return [Fraction(given(full & ~b) - given(full)) for b in range(1 << src.n)]


def mutual_information(src: LinearSource, W: Matrix) -> Fraction:
    """I(W ^ Z_V) = rank(W) + rank(Z_V) - rank(W, Z_V)."""
    z = src.stack(src.everyone)
    return Fraction(gf2_rank(W) + gf2_rank(z) - gf2_rank(tuple(W) + z))


def _prepare(src: LinearSource) -> None:
    _no_wiretap(src)
    check_vertex_count(src.n)
    if popcount(src.active) < 2:
        raise ValidationError("at least two active users are required")


def rco_linear(src: LinearSource, method: str = LAZY) -> Fraction:
    """min r(V) over free r with r(B) >= H(Z_B | Z_{V\\B}) for every B not containing A."""
    _prepare(src)
    sol, _ = omniscience_program(src.n, src.active, cond_entropy_table(src), method=method)
    return sol.value


def cs_linear(src: LinearSource, method: str = LAZY) -> Fraction:
    return rank_entropy(src, [src.stack(src.everyone)]) - rco_linear(src, method)


def rho(src: LinearSource, W: Matrix, caps: Sequence | None = None, method: str = LAZY) -> Fraction | None:
    """min r'(V) s.t. r'(B) >= I(W ^ Z_B | Z_{V\\B}) and r'_i <= caps[i]; None if infeasible."""
    _prepare(src)
    if caps is not None and len(caps) != src.n:
        raise ValidationError("rate vector length does not match the user count")
    sol, _ = omniscience_program(src.n, src.active, info_table(src, W), caps, method)
    return sol.value if sol.optimal else None


def theorem1_bound(src: LinearSource, W: Matrix, r: Sequence | None = None, method: str = LAZY) -> Fraction | None:
    """I(W ^ Z_V) - min r'(V) under the individual caps r (None = uncapped).

    Returns None when the caps make the r' constraints infeasible.
    """
    caps = None if r is None else [None if v is None else Fraction(v) for v in r]
    least = rho(src, W, caps, method)
    if least is None:
        return None
    return mutual_information(src, W) - least


def rs_lower_bound_at_w(src: LinearSource, W: Matrix, r_K, method: str = LAZY) -> tuple[bool, Fraction | None]:
    """(feasible, I(W ^ Z_V) - r_K): W qualifies when I(W ^ Z_V) - rho(W) >= r_K."""
    r_K = Fraction(r_K)
    if r_K < 0:
        raise ValidationError("key rate must be nonnegative")
    info = mutual_information(src, W)
    if info - rho(src, W, method=method) < r_K:
        return False, None
    return True, info - r_K


def hypergraph_to_linear(source: HypergraphSource) -> LinearSource:
    """Each edge contributes w_e fresh bits, copied to every incident user."""
    if source.has_adversaries:
        raise ValidationError("reduce adversaries before converting to a linear source")
    rows: list[list[int]] = [[] for _ in range(source.n)]
    m = 0
    for e in source.edges:
        if e.weight.denominator != 1:
            raise ValidationError("only integer edge entropies have a GF(2) realisation")
        for _ in range(e.weight.numerator):
            for i in bits(e.incidence):
                rows[i].append(1 << m)
            m += 1
    return LinearSource(m, source.vertices, tuple(tuple(r) for r in rows), source.active)


def subspaces(m: int, limit: int = 6) -> list[Matrix]:
    """A basis for every subspace of GF(2)^m, smallest dimension first."""
    if m > limit:
        raise ValidationError(f"subspace enumeration beyond m = {limit} is not supported")
    seen = {frozenset({0}): ()}
    frontier = [(frozenset({0}), ())]
    while frontier:
        nxt = []
        for space, basis in frontier:
            for v in range(1, 1 << m):
                if v in space:
                    continue
                bigger = span(basis + (v,))
                if bigger not in seen:
                    seen[bigger] = basis + (v,)
                    nxt.append((bigger, basis + (v,)))
        frontier = nxt
    return list(seen.values())


# bit j of a row is X_j with (a, b, c, d) = (X_0, X_1, X_2, X_3)
_A, _B, _C, _D = 1, 2, 4, 8


def counterexample_source() -> LinearSource:
    """Five users over bits a, b, c, d: a | b | c | (a, b, d) | (a, b, c+d)."""
    mats = ((_A,), (_B,), (_C,), (_A, _B, _D), (_A, _B, _C ^ _D))
    return LinearSource(4, ("1", "2", "3", "4", "5"), mats, 0b11111)


@dataclass(frozen=True)
class CounterexampleReport:
    total_entropy: Fraction
    rco: Fraction
    cs: Fraction
    rs_upper: Fraction  # omniscience at rate R_CO achieves C_S
    w_abc: Matrix
    bound_at_abc: Fraction | None
    rho_abc: Fraction
    theorem1_at_abc: Fraction
    best_bound: Fraction
    best_w: Matrix
    subspaces_tested: int
    restriction: str = "W ranges over deterministic GF(2)-linear functions of the base bits"


def counterexample_report() -> CounterexampleReport:
    """Exact numbers showing the rho-based lower bound stays strictly below R_CO."""
    src = counterexample_source()
    h = rank_entropy(src, [src.stack(src.everyone)])
    omni = rco_linear(src)
    cs = h - omni
    w_abc = (_A, _B, _C)
    _, at_abc = rs_lower_bound_at_w(src, w_abc, cs)
    best, best_w, tested = None, (), 0
    for W in subspaces(src.m):
        tested += 1
        ok, value = rs_lower_bound_at_w(src, W, cs)
        if ok and (best is None or value < best):
            best, best_w = value, W
    return CounterexampleReport(
        h, omni, cs, omni, w_abc, at_abc, rho(src, w_abc), theorem1_bound(src, w_abc), best, best_w, tested
    )
