"""Secrecy capacity, communication complexity and omniscience rates.

Every program here has one row per subset B that misses at least one active
user (B not a superset of A).  They are solved either with every such row
materialised (``method="eager"``) or by cutting planes whose separation
oracle is exhaustive deficit minimisation (``method="lazy"``, the default).

Sources carrying untrusted helpers or wiretapped edges are first reduced
with :func:`skalc.model.reduce_for_adversaries`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .errors import InfeasibleRateError, SolverError, ValidationError, check_vertex_count
from .exactlp import (
    GE,
    LE,
    Constraint,
    LinearProgram,
    LpSolution,
    _argmin_avoiding,
    deficit_table,
    solve,
    solve_with_separation,
)
from .model import (
    HypergraphSource,
    Mask,
    bits,
    cond_entropy_table,
    reduce_for_adversaries,
    total_entropy,
)
from .partitions import COVER, PARTITION, FractionalAssignment

EAGER, LAZY = "eager", "lazy"
ZERO = Fraction(0)
ONE = Fraction(1)


class Omniscience(NamedTuple):
    value: Fraction
    rates: tuple[Fraction, ...]
    dual: FractionalAssignment


@dataclass(frozen=True)
class CapacityPoint:
    """Optimal (x, r) for the capacity program at total rate R.

    ``witness_lambda`` is the dual on the subset rows, a fractional cover
    whose coverage equals ``1 + slope`` at every vertex; ``slope`` is the
    dual of the total-rate row, a supergradient of C_S at R.
    """

    R: Fraction
    value: Fraction
    witness_x: tuple[Fraction, ...]
    witness_r: tuple[Fraction, ...]
    witness_lambda: FractionalAssignment
    slope: Fraction


@dataclass(frozen=True)
class CapacityCurve:
    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        pts = self.breakpoints
        return tuple((c1 - c0) / (r1 - r0) for (r0, c0), (r1, c1) in zip(pts, pts[1:]))

    @property
    def saturation_rate(self) -> Fraction:
        return self.breakpoints[-1][0]

    def value_at(self, R) -> Fraction:
        R = Fraction(R)
        if R < 0:
            raise ValidationError("discussion rate must be nonnegative")
        pts = self.breakpoints
        for (r0, c0), (r1, c1) in zip(pts, pts[1:]):
            if R <= r1:
                return c0 + (c1 - c0) * (R - r0) / (r1 - r0)
        return pts[-1][1]


@dataclass(frozen=True)
class ReducedSource:
    """Source with edge entropies cut from w_e to x_e (decremental reduction)."""

    source: HypergraphSource
    x: tuple[Fraction, ...]
    R: Fraction
    capacity: Fraction
    omniscience_rate: Fraction


def effective_source(source: HypergraphSource) -> HypergraphSource:
    return reduce_for_adversaries(source) if source.has_adversaries else source


def _prepare(source: HypergraphSource) -> HypergraphSource:
    src = effective_source(source)
    check_vertex_count(src.n)
    if bin(src.active).count("1") < 2:
        raise ValidationError("capacity computations need at least two active users")
    return src


def constrained_subsets(n: int, active: Mask) -> list[Mask]:
    """Nonempty masks B over n vertices with B not a superset of ``active``."""
    return [b for b in range(1, 1 << n) if b & active != active]


def _seed_subsets(n: int, active: Mask) -> list[Mask]:
    # {i} and V\{i} for active i: enough rows to bound every program below
    everyone = (1 << n) - 1
    seeds: list[Mask] = []
    for i in bits(active):
        for b in (1 << i, everyone & ~(1 << i)):
            if b and b not in seeds:
                seeds.append(b)
    return seeds


def solve_subset_family(
    n: int,
    active: Mask,
    base: LinearProgram,
    row_for: Callable[[Mask], Constraint],
    slack_table: Callable[[Sequence[Fraction]], Sequence[Fraction]],
    method: str = LAZY,
) -> LpSolution:
    """Solve ``base`` plus one row per B not containing A.

    ``slack_table(point)[B]`` must be (row lhs - rhs) at ``point`` for
    every mask, so a negative entry marks a violated row.
    """
    if method == EAGER:
        return solve(base.with_constraints(row_for(b) for b in constrained_subsets(n, active)))
    if method != LAZY:
        raise ValidationError(f"unknown method {method!r}")

    def separator(point):
        table = slack_table(point)
        cuts, chosen = [], set()
        for i in bits(active):
            b, val = _argmin_avoiding(table, i)
            if val < 0 and b not in chosen:
                chosen.add(b)
                cuts.append(row_for(b))
        return cuts

    seeded = base.with_constraints(row_for(b) for b in _seed_subsets(n, active))
    return solve_with_separation(seeded, separator, max_cuts=1 << n)


def subset_duals(sol: LpSolution, program_rows: Sequence[Constraint]) -> dict[Mask, Fraction]:
    out: dict[Mask, Fraction] = {}
    for row, y in zip(program_rows, sol.duals):
        if isinstance(row.label, int) and y:
            out[row.label] = out.get(row.label, ZERO) + y
    return out


def _rows_of(base: LinearProgram, sol: LpSolution, method: str, n: int, active: Mask,
             row_for) -> tuple[Constraint, ...]:
    if method == EAGER:
        return base.constraints + tuple(row_for(b) for b in constrained_subsets(n, active))
    return base.constraints + tuple(row_for(b) for b in _seed_subsets(n, active)) + sol.cuts


def omniscience_program(
    n: int,
    active: Mask,
    h: Sequence[Fraction],
    caps: Sequence[Fraction | None] | None = None,
    method: str = LAZY,
) -> tuple[LpSolution, dict[Mask, Fraction]]:
    """min r(V) s.t. r(B) >= h[B] for all B not containing A, optional r_i <= caps[i].

    Returns the solution and the subset duals (lambda).  ``h`` is any set
    function given as a table over all 2^n masks.
    """
    ones = tuple([ONE] * n)
    bounds = tuple((None, None if caps is None or caps[i] is None else Fraction(caps[i]))
                   for i in range(n))
    base = LinearProgram(ones, (), "min", bounds)

    def row_for(b: Mask) -> Constraint:
        return Constraint(tuple(ONE if b >> i & 1 else ZERO for i in range(n)), GE, h[b], b)

    def slack(point):
        rsum = [ZERO] * (1 << n)
        for b in range(1, 1 << n):
            low = b & -b
            rsum[b] = rsum[b ^ low] + point[low.bit_length() - 1]
        return [rs - hb for rs, hb in zip(rsum, h)]

    sol = solve_subset_family(n, active, base, row_for, slack, method)
    if not sol.optimal:
        return sol, {}
    rows = _rows_of(base, sol, method, n, active, row_for)
    return sol, subset_duals(sol, rows)


def rco(source: HypergraphSource, method: str = LAZY) -> Omniscience:
    """Smallest total discussion rate for omniscience, with an optimal rate vector."""
    src = _prepare(source)
    sol, lam = omniscience_program(src.n, src.active, cond_entropy_table(src), method=method)
    if not sol.optimal:
        raise SolverError(f"omniscience program is {sol.status}")
    return Omniscience(sol.value, sol.point, FractionalAssignment(lam, PARTITION))


def cs_unconstrained(source: HypergraphSource, method: str = LAZY) -> Fraction:
    """C_S = H(Z_V) - R_CO, cross-checked against I_lambda at the dual partition."""
    src = _prepare(source)
    omni = rco(src, method)
    value = total_entropy(src) - omni.value
    table = cond_entropy_table(src)
    i_dual = total_entropy(src) - sum((w * table[b] for b, w in omni.dual.weights.items()), ZERO)
    if i_dual != value:
        raise SolverError(f"I_lambda at the dual partition {i_dual} differs from C_S {value}")
    return value


def _capacity_rows(src: HypergraphSource, extra_vars: int = 0):
    n, m = src.n, len(src.edges)
    width = n + m + extra_vars

    def row_for(b: Mask) -> Constraint:
        coeffs = [ZERO] * width
        for i in bits(b):
            coeffs[i] = ONE
        for k, e in enumerate(src.edges):
            if e.incidence & ~b == 0:
                coeffs[n + k] = -ONE
        return Constraint(tuple(coeffs), GE, ZERO, b)

    def slack(point):
        return deficit_table(src, point[:n], point[n:n + m])

    return row_for, slack


def _point_from(src: HypergraphSource, sol: LpSolution, rows, R) -> CapacityPoint:
    n, m = src.n, len(src.edges)
    r = sol.point[:n]
    x = sol.point[n:n + m]
    lam: dict[Mask, Fraction] = {}
    slope = ZERO
    for row, y in zip(rows, sol.duals):
        if isinstance(row.label, int):
            if y:
                lam[row.label] = lam.get(row.label, ZERO) - y
        elif row.label == "total":
            slope = y
    value = sum(x, ZERO) - sum(r, ZERO)
    return CapacityPoint(Fraction(R), value, tuple(x), tuple(r), FractionalAssignment(lam, COVER), slope)


def _base_bounds(src: HypergraphSource, strict: bool):
    rate = (ZERO, None) if strict else (None, None)
    return tuple([rate] * src.n) + tuple((ZERO, e.weight) for e in src.edges)


def cs_at_rate(source: HypergraphSource, R, method: str = LAZY, strict: bool = False) -> CapacityPoint:
    """C_S(R): max x(E) - r(V) s.t. r(V) <= R, r(B) >= x(E(B)), 0 <= x <= w.

    Rates are sign-free unless ``strict`` adds r_i >= 0 (the singleton rows
    already imply it whenever |A| >= 2).
    """
    R = Fraction(R)
    if R < 0:
        raise ValidationError("discussion rate must be nonnegative")
    src = _prepare(source)
    n, m = src.n, len(src.edges)
    objective = tuple([-ONE] * n + [ONE] * m)
    total = Constraint(tuple([ONE] * n + [ZERO] * m), LE, R, "total")
    base = LinearProgram(objective, (total,), "max", _base_bounds(src, strict))
    row_for, slack = _capacity_rows(src)
    sol = solve_subset_family(n, src.active, base, row_for, slack, method)
    if not sol.optimal:
        raise SolverError(f"capacity program is {sol.status}")
    rows = _rows_of(base, sol, method, n, src.active, row_for)
    return _point_from(src, sol, rows, R)


def gk_zero_rate(source: HypergraphSource) -> Fraction:
    """Total weight of edges seen by every active user (C_S at zero discussion)."""
    src = effective_source(source)
    A = src.active
    return sum((e.weight for e in src.edges if e.incidence & A == A), ZERO)


def rs_at_key_rate(source: HypergraphSource, key_rate, method: str = LAZY) -> tuple[Fraction, CapacityPoint]:
    """R_S(r_K): least total discussion rate achieving key rate r_K."""
    key_rate = Fraction(key_rate)
    if key_rate < 0:
        raise ValidationError("key rate must be nonnegative")
    src = _prepare(source)
    cap = cs_unconstrained(src, method)
    if key_rate > cap:
        raise InfeasibleRateError(f"key rate {key_rate} exceeds the secrecy capacity {cap}")
    n, m = src.n, len(src.edges)
    objective = tuple([ONE] * n + [ZERO] * m)
    key = Constraint(tuple([-ONE] * n + [ONE] * m), GE, key_rate, "key")
    base = LinearProgram(objective, (key,), "min", _base_bounds(src, False))
    row_for, slack = _capacity_rows(src)
    sol = solve_subset_family(n, src.active, base, row_for, slack, method)
    if not sol.optimal:
        raise SolverError(f"communication complexity program is {sol.status}")
    rows = _rows_of(base, sol, method, n, src.active, row_for)
    point = _point_from(src, sol, rows, sol.value)
    return sol.value, point


def _probe(src: HypergraphSource, lo: Fraction, hi: Fraction, slope: Fraction, method: str):
    """max over R in [lo, hi] of C_S(R) - slope * R; returns (R*, C_S(R*), objective)."""
    n, m = src.n, len(src.edges)
    objective = tuple([-ONE] * n + [ONE] * m + [-slope])
    total = Constraint(tuple([ONE] * n + [ZERO] * m + [-ONE]), LE, ZERO, "total")
    bounds = _base_bounds(src, False) + ((lo, hi),)
    base = LinearProgram(objective, (total,), "max", bounds)
    row_for, slack = _capacity_rows(src, extra_vars=1)
    sol = solve_subset_family(n, src.active, base, row_for, slack, method)
    if not sol.optimal:
        raise SolverError(f"curve probe is {sol.status}")
    r_star = sol.point[-1]
    c_star = sum(sol.point[n:n + m], ZERO) - sum(sol.point[:n], ZERO)
    return r_star, c_star, sol.value


def capacity_curve(source: HypergraphSource, method: str = LAZY) -> CapacityCurve:
    """All breakpoints of the concave piecewise-linear map R -> C_S(R) on [0, R_S].

    Chord refinement: on [a, b] maximise C_S(R) - s R with s the chord slope.
    If the maximum sits on the chord the piece is linear; otherwise the
    maximiser splits the interval.  Each split either lands on a breakpoint
    or consumes a distinct segment slope, so the recursion is finite.
    """
    src = _prepare(source)
    cap = cs_unconstrained(src, method)
    r_sat, _ = rs_at_key_rate(src, cap, method)
    values = {ZERO: cs_at_rate(src, 0, method).value, r_sat: cap}
    stack = [(ZERO, r_sat)] if r_sat > 0 else []
    while stack:
        a, b = stack.pop()
        s = (values[b] - values[a]) / (b - a)
        r_star, c_star, best = _probe(src, a, b, s, method)
        if best == values[a] - s * a:
            continue
        if not a < r_star < b:
            raise SolverError("curve probe returned an endpoint for a nonlinear piece")
        values[r_star] = c_star
        stack.extend([(a, r_star), (r_star, b)])
    pts = sorted(values.items())
    kept = [pts[0]]
    for k in range(1, len(pts) - 1):
        (r0, c0), (r1, c1), (r2, c2) = kept[-1], pts[k], pts[k + 1]
        if (c1 - c0) * (r2 - r1) != (c2 - c1) * (r1 - r0):
            kept.append(pts[k])
    if len(pts) > 1:
        kept.append(pts[-1])
    return CapacityCurve(tuple(kept))


def rho_of_x(source: HypergraphSource, x: Sequence) -> Fraction:
    """rho(x) = min r(V) s.t. r(B) >= x(E(B)): R_CO of the source reweighted by x."""
    src = _prepare(source)
    x = tuple(Fraction(v) for v in x)
    if len(x) != len(src.edges):
        raise ValidationError("edge vector length does not match the source")
    for v, e in zip(x, src.edges):
        if not 0 <= v <= e.weight:
            raise ValidationError("edge vector must satisfy 0 <= x_e <= H(X_e)")
    return rco(src.with_weights(x)).value


def optimal_reduced_source(source: HypergraphSource, R, method: str = LAZY) -> ReducedSource:
    """Decremental reduction at rate R, with its achievability postconditions checked."""
    src = _prepare(source)
    point = cs_at_rate(src, R, method)
    reduced = src.with_weights(point.witness_x)
    omni = rco(reduced, method).value
    cap = total_entropy(reduced) - omni
    if cap != point.value:
        raise SolverError(f"C_S of the reduced source {cap} != C_S(R) {point.value}")
    if omni > point.R:
        raise SolverError(f"R_CO of the reduced source {omni} exceeds R = {point.R}")
    return ReducedSource(reduced, point.witness_x, point.R, cap, omni)


def cs_vector_rate_upper_bound(source: HypergraphSource, rates: Sequence, method: str = LAZY) -> Fraction:
    """Upper bound on C_S(r_V) under individual rate caps (``None`` = uncapped).

    max x(E) - r'(V) s.t. r'_i <= r_i, r'(B) >= x(E(B)), 0 <= x <= w.
    This is a bound, not the capacity: tightness is open.
    """
    src = _prepare(source)
    n, m = src.n, len(src.edges)
    if len(rates) != n:
        raise ValidationError("rate vector length does not match the vertex count")
    caps = [None if v is None else Fraction(v) for v in rates]
    if any(c is not None and c < 0 for c in caps):
        raise ValidationError("individual rates must be nonnegative")
    objective = tuple([-ONE] * n + [ONE] * m)
    bounds = tuple((None, c) for c in caps) + tuple((ZERO, e.weight) for e in src.edges)
    base = LinearProgram(objective, (), "max", bounds)
    row_for, slack = _capacity_rows(src)
    sol = solve_subset_family(n, src.active, base, row_for, slack, method)
    if not sol.optimal:
        raise SolverError(f"individual-rate bound program is {sol.status}")
    return sol.value
