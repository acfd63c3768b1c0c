"""Exact rational linear programming.

Two-phase primal simplex on a dense tableau with Bland's anti-cycling rule.
Free variables are not split: a free column enters the basis with priority
(its sign flipped if the improving direction is negative) and is never
selected to leave, so constraint duals keep their direct meaning.

All tableau arithmetic runs on ``gmpy2.mpq`` when available (an order of
magnitude faster than ``fractions.Fraction``) and falls back to
``Fraction`` otherwise; every value crossing the module boundary is a
``Fraction``.

Dual convention: ``duals[i]`` is the rate of change of the optimal value
per unit increase of ``constraints[i].rhs``.  Every optimal solution is
certified before it is returned: primal feasibility, dual sign conditions,
complementary slackness, and primal value == dual value, all exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import SolverError, ValidationError, check_vertex_count
from .model import HypergraphSource, Mask, inside_weight_table

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _Q

    def _to_fraction(q) -> Fraction:
        return Fraction(int(q.numerator), int(q.denominator))

    def _to_q(v):
        if isinstance(v, Fraction):
            return _Q(v.numerator, v.denominator)
        return _Q(v)

except ImportError:  # pragma: no cover
    _Q = Fraction

    def _to_fraction(q) -> Fraction:
        return Fraction(q)

    def _to_q(v):
        return Fraction(v)


LE, EQ, GE = "<=", "==", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"
_RELATIONS = (LE, EQ, GE)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction
    label: object = None

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValidationError(f"unknown relation {self.relation!r}")

    def activity(self, point: Sequence) -> Fraction:
        return sum((a * x for a, x in zip(self.coeffs, point) if a), Fraction(0))

    def satisfied_by(self, point: Sequence) -> bool:
        lhs = self.activity(point)
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


def constraint(coeffs: Iterable, relation: str, rhs, label=None) -> Constraint:
    return Constraint(tuple(Fraction(c) for c in coeffs), relation, Fraction(rhs), label)


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` (max|min) of ``objective . x`` subject to rows and per-variable bounds.

    ``bounds[j] = (lower, upper)`` with ``None`` meaning -inf / +inf; the
    default is ``(0, None)`` for every variable.
    """

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...] = ()
    sense: str = "max"
    bounds: tuple[tuple[Fraction | None, Fraction | None], ...] | None = None

    def __post_init__(self):
        n = len(self.objective)
        if self.sense not in ("max", "min"):
            raise ValidationError(f"unknown sense {self.sense!r}")
        for k, row in enumerate(self.constraints):
            if len(row.coeffs) != n:
                raise ValidationError(f"constraint {k} has {len(row.coeffs)} coefficients, expected {n}")
        if self.bounds is not None:
            if len(self.bounds) != n:
                raise ValidationError("bounds length does not match the variable count")
            for j, (lo, hi) in enumerate(self.bounds):
                if lo is not None and hi is not None and lo > hi:
                    raise ValidationError(f"variable {j} has lower bound above upper bound")

    @property
    def n(self) -> int:
        return len(self.objective)

    def var_bounds(self) -> tuple[tuple[Fraction | None, Fraction | None], ...]:
        if self.bounds is None:
            return ((Fraction(0), None),) * self.n
        return self.bounds

    def with_constraints(self, extra: Iterable[Constraint]) -> "LinearProgram":
        return replace(self, constraints=self.constraints + tuple(extra))

    def evaluate(self, point: Sequence) -> Fraction:
        return sum((c * x for c, x in zip(self.objective, point) if c), Fraction(0))


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] = ()
    duals: tuple[Fraction, ...] = ()
    pivots: int = 0
    cuts: tuple[Constraint, ...] = field(default=())

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Dense simplex tableau in the internal form: max c.y, rows = b >= 0.

    Column layout: structural | slack/surplus | artificial.
    """

    def __init__(self, rows, rhs, n_struct, free, n_slack, art_of_row, id_col):
        self.T = rows
        self.b = rhs
        self.n_struct = n_struct
        self.free = free  # set of free structural columns
        self.ncols = len(rows[0]) if rows else n_struct + n_slack
        self.art_start = n_struct + n_slack
        self.art_of_row = art_of_row
        self.id_col = id_col
        self.basis = list(id_col)
        self.sign = [1] * n_struct
        self.pivots = 0
        self.d: list = []
        self.obj = _Q(0)

    def set_costs(self, cost):
        zero = _Q(0)
        d = list(cost)
        obj = zero
        for k, col in enumerate(self.basis):
            cb = cost[col]
            if cb:
                row = self.T[k]
                for j in range(self.ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
                obj += cb * self.b[k]
        self.d = d
        self.obj = obj

    def pivot(self, r, c):
        T = self.T
        row = T[r]
        inv = 1 / row[c]
        nz = [j for j in range(self.ncols) if row[j]]
        for j in nz:
            row[j] *= inv
        self.b[r] *= inv
        br = self.b[r]
        for k in range(len(T)):
            if k == r:
                continue
            other = T[k]
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
                self.b[k] -= f * br
        f = self.d[c]
        if f:
            d = self.d
            for j in nz:
                d[j] -= f * row[j]
            self.obj += f * br
        self.basis[r] = c
        self.pivots += 1

    def _flip(self, j):
        for row in self.T:
            if row[j]:
                row[j] = -row[j]
        self.d[j] = -self.d[j]
        self.sign[j] = -self.sign[j]

    def entering(self, allow_art):
        basic = set(self.basis)
        d = self.d
        for j in sorted(self.free):
            if j not in basic and d[j]:
                if d[j] < 0:
                    self._flip(j)
                return j
        limit = self.ncols if allow_art else self.art_start
        for j in range(limit):
            if d[j] > 0 and j not in basic:
                return j
        return None

    def leaving(self, c):
        best = None
        for k, row in enumerate(self.T):
            a = row[c]
            if a > 0 and self.basis[k] not in self.free:
                ratio = self.b[k] / a
                key = (ratio, self.basis[k])
                if best is None or key < best[0]:
                    best = (key, k)
        return None if best is None else best[1]

    def run(self, allow_art) -> str:
        while True:
            c = self.entering(allow_art)
            if c is None:
                return OPTIMAL
            r = self.leaving(c)
            if r is None:
                return UNBOUNDED
            self.pivot(r, c)

    def drive_out_artificials(self):
        for k, col in enumerate(self.basis):
            if col < self.art_start:
                continue
            row = self.T[k]
            for j in range(self.art_start):
                if row[j]:
                    self.pivot(k, j)
                    break
            # otherwise the row is redundant; its artificial stays basic at zero


def _standard_form(lp: LinearProgram):
    """Translate to internal max form with nonnegative or free structural columns."""
    n = lp.n
    zero = _Q(0)
    kinds = []
    shift = []
    extra_rows = []  # (coeff dict, relation, rhs, origin)
    for j, (lo, hi) in enumerate(lp.var_bounds()):
        if lo is not None:
            kinds.append(1)
            shift.append(_to_q(lo))
            if hi is not None:
                extra_rows.append(({j: _Q(1)}, LE, _to_q(hi) - _to_q(lo), ("ub", j)))
        elif hi is not None:
            kinds.append(-1)
            shift.append(_to_q(hi))
        else:
            kinds.append(0)
            shift.append(zero)

    sgn = 1 if lp.sense == "max" else -1
    cost = []
    const = zero
    for j, c in enumerate(lp.objective):
        cq = _to_q(c) * sgn
        cost.append(cq * kinds[j] if kinds[j] else cq)
        const += cq * shift[j]

    raw_rows = []
    for i, row in enumerate(lp.constraints):
        coeffs = {}
        rhs = _to_q(row.rhs)
        for j, a in enumerate(row.coeffs):
            if not a:
                continue
            aq = _to_q(a)
            coeffs[j] = aq * kinds[j] if kinds[j] else aq
            rhs -= aq * shift[j]
        raw_rows.append((coeffs, row.relation, rhs, ("row", i)))
    raw_rows.extend(extra_rows)

    normalized = []
    for coeffs, rel, rhs, origin in raw_rows:
        negated = rhs < 0
        if negated:
            coeffs = {j: -a for j, a in coeffs.items()}
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        normalized.append((coeffs, rel, rhs, origin, negated))

    m = len(normalized)
    n_slack = sum(1 for _, rel, *_ in normalized if rel != EQ)
    n_art = sum(1 for _, rel, *_ in normalized if rel != LE)
    ncols = n + n_slack + n_art
    rows, rhs_list, id_col, art_of_row = [], [], [], []
    s_next, a_next = n, n + n_slack
    for coeffs, rel, rhs, origin, negated in normalized:
        row = [zero] * ncols
        for j, a in coeffs.items():
            row[j] = a
        if rel == LE:
            row[s_next] = _Q(1)
            id_col.append(s_next)
            art_of_row.append(None)
            s_next += 1
        else:
            if rel == GE:
                row[s_next] = _Q(-1)
                s_next += 1
            row[a_next] = _Q(1)
            id_col.append(a_next)
            art_of_row.append(a_next)
            a_next += 1
        rows.append(row)
        rhs_list.append(rhs)
    free = {j for j in range(n) if kinds[j] == 0}
    tab = _Tableau(rows, rhs_list, n, free, n_slack, art_of_row, id_col)
    tab.ncols = ncols
    tab.art_start = n + n_slack
    meta = dict(kinds=kinds, shift=shift, cost=cost, const=const, sgn=sgn,
                normalized=normalized, m=m)
    return tab, meta


def solve(lp: LinearProgram) -> LpSolution:
    """Exact optimum of ``lp``; infeasible/unbounded are reported as statuses."""
    tab, meta = _standard_form(lp)
    zero = _Q(0)
    n = lp.n

    if tab.art_start < tab.ncols:
        phase1 = [zero] * tab.ncols
        for j in range(tab.art_start, tab.ncols):
            phase1[j] = _Q(-1)
        tab.set_costs(phase1)
        tab.run(allow_art=True)
        if tab.obj < 0:
            return LpSolution(INFEASIBLE, pivots=tab.pivots)
        tab.drive_out_artificials()

    cost = [zero] * tab.ncols
    for j in range(n):
        cost[j] = meta["cost"][j] * tab.sign[j]
    tab.set_costs(cost)
    if tab.run(allow_art=False) == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=tab.pivots)

    y = [zero] * n
    for k, col in enumerate(tab.basis):
        if col < n:
            y[col] = tab.b[k] * tab.sign[col]
    x = []
    for j in range(n):
        kind = meta["kinds"][j]
        if kind == 1:
            x.append(meta["shift"][j] + y[j])
        elif kind == -1:
            x.append(meta["shift"][j] - y[j])
        else:
            x.append(y[j])

    internal_value = tab.obj + meta["const"]
    duals = [zero] * len(lp.constraints)
    for k, (_, _, _, origin, negated) in enumerate(meta["normalized"]):
        if origin[0] != "row":
            continue
        yk = -tab.d[tab.id_col[k]]
        if negated:
            yk = -yk
        duals[origin[1]] = yk * meta["sgn"]
    value = internal_value * meta["sgn"]
    _certify(lp, x, duals, value)
    return LpSolution(
        OPTIMAL,
        _to_fraction(value),
        tuple(_to_fraction(v) for v in x),
        tuple(_to_fraction(v) for v in duals),
        pivots=tab.pivots,
    )


def _certify(lp: LinearProgram, x, duals, value) -> None:
    """Exact optimality certificate; raises SolverError on any violation."""
    zero = _Q(0)
    maximize = lp.sense == "max"
    obj = [_to_q(c) for c in lp.objective]
    primal = sum((c * v for c, v in zip(obj, x) if c), zero)
    if primal != value:
        raise SolverError(f"objective at point {primal} differs from tableau value {value}")
    bounds = [(None if lo is None else _to_q(lo), None if hi is None else _to_q(hi))
              for lo, hi in lp.var_bounds()]
    for j, (lo, hi) in enumerate(bounds):
        if (lo is not None and x[j] < lo) or (hi is not None and x[j] > hi):
            raise SolverError(f"variable {j} violates its bounds")
    reduced = list(obj)
    dual_value = zero
    for i, row in enumerate(lp.constraints):
        coeffs = [_to_q(a) for a in row.coeffs]
        rhs = _to_q(row.rhs)
        act = sum((a * v for a, v in zip(coeffs, x) if a), zero)
        rel = row.relation
        if (rel == LE and act > rhs) or (rel == GE and act < rhs) or (rel == EQ and act != rhs):
            raise SolverError(f"constraint {i} violated at the returned point")
        yi = duals[i]
        if yi:
            if act != rhs:
                raise SolverError(f"complementary slackness fails on constraint {i}")
            positive_ok = (rel == LE) == maximize
            if rel != EQ and (yi > 0) != positive_ok:
                raise SolverError(f"dual of constraint {i} has the wrong sign")
            for j, a in enumerate(coeffs):
                if a:
                    reduced[j] -= yi * a
            dual_value += yi * rhs
    for j, rc in enumerate(reduced):
        if not rc:
            continue
        lo, hi = bounds[j]
        at_upper = (rc > 0) == maximize
        target = hi if at_upper else lo
        if target is None or x[j] != target:
            raise SolverError(f"reduced cost of variable {j} is not supported by an active bound")
        dual_value += rc * target
    if dual_value != value:
        raise SolverError(f"duality gap: primal {value} != dual {dual_value}")


Separator = Callable[[tuple[Fraction, ...]], "Constraint | Sequence[Constraint] | None"]


def solve_with_separation(
    base: LinearProgram, separator: Separator, max_cuts: int | None = None
) -> LpSolution:
    """Cutting-plane solve of an implicitly specified LP.

    ``separator(point)`` returns a violated constraint (or several), or
    ``None``/empty when ``point`` is feasible for the full LP.  The loop
    ends after a separator pass that finds nothing, which doubles as the
    final feasibility re-check.  ``base`` must already bound the objective.
    """
    lp = base
    added: list[Constraint] = []
    seen = {(c.coeffs, c.relation, c.rhs) for c in base.constraints}
    while True:
        sol = solve(lp)
        if not sol.optimal:
            return replace(sol, cuts=tuple(added))
        found = separator(sol.point)
        if found is None:
            found = []
        elif isinstance(found, Constraint):
            found = [found]
        fresh = []
        for cut in found:
            key = (cut.coeffs, cut.relation, cut.rhs)
            if cut.satisfied_by(sol.point):
                raise SolverError("separator returned a constraint the point already satisfies")
            if key in seen:
                raise SolverError("separator repeated a constraint already in the program")
            seen.add(key)
            fresh.append(cut)
        if not fresh:
            return replace(sol, cuts=tuple(added))
        added.extend(fresh)
        if max_cuts is not None and len(added) > max_cuts:
            raise SolverError(f"more than {max_cuts} cuts generated; the separator is broken")
        lp = lp.with_constraints(fresh)


def deficit_table(source: HypergraphSource, r: Sequence, x: Sequence) -> list:
    """``table[B] = r(B) - x(E(B))`` for every subset mask B."""
    n = source.n
    if len(r) != n or len(x) != len(source.edges):
        raise ValidationError("rate/edge vectors do not match the source")
    inside = inside_weight_table(n, [(e.incidence, w) for e, w in zip(source.edges, x)],
                                 zero=Fraction(0))
    rsum = [Fraction(0)] * (1 << n)
    for b in range(1, 1 << n):
        low = b & -b
        rsum[b] = rsum[b ^ low] + r[low.bit_length() - 1]
    return [rs - ins for rs, ins in zip(rsum, inside)]


def min_deficit(source: HypergraphSource, r: Sequence, x: Sequence, i: int) -> tuple[Mask, Fraction]:
    """Minimise ``r(B) - x(E(B))`` over all B not containing vertex ``i``.

    Exhaustive over 2^(n-1) subsets.  Among minimisers the numerically
    largest mask wins, which for a submodular deficit is the unique
    inclusion-wise maximal minimiser.
    """
    check_vertex_count(source.n)
    if not 0 <= i < source.n:
        raise ValidationError(f"vertex index {i} out of range")
    table = deficit_table(source, r, x)
    return _argmin_avoiding(table, i)


def _argmin_avoiding(table: Sequence, i: int) -> tuple[Mask, Fraction]:
    bit = 1 << i
    best_mask, best = 0, table[0]
    for b in range(1, len(table)):
        if b & bit:
            continue
        if table[b] <= best:
            best_mask, best = b, table[b]
    return best_mask, best
