"""Upper bounds on C_S(R) through the lamination family, and helper-set lower bounds on r(S)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .capacity import _prepare, constrained_subsets, cs_at_rate, rs_at_key_rate
from .errors import DEFAULT_PARTITION_LIMIT, InfeasibleRateError, SolverError, ValidationError
from .exactlp import EQ, GE, LE, Constraint, LinearProgram, solve
from .model import HypergraphSource, Mask, bits, cond_entropy_table, popcount, restrict, total_entropy
from .partitions import (
    PARTITION,
    FractionalAssignment,
    check_partition,
    enumerate_partitions,
    i_lambda,
    lambda_from_partition,
    lambda_from_weights,
    validate,
)

OK, UNBOUNDED, NOT_APPLICABLE = "ok", "unbounded", "not applicable"
UPPER, LOWER = "upper", "lower"
ZERO, ONE = Fraction(0), Fraction(1)


@dataclass(frozen=True)
class BoundReport:
    """One bound evaluation.  ``value`` is None unless ``status == "ok"``.

    For upper bounds ``gap = value - exact >= 0``; for lower bounds on a
    rate, ``exact`` is an achieving rate and ``gap = value - exact <= 0``.
    """

    name: str
    value: Fraction | None
    status: str = OK
    params: dict = field(default_factory=dict)
    exact: Fraction | None = None
    kind: str = UPPER
    notes: tuple[str, ...] = ()

    @property
    def gap(self) -> Fraction | None:
        if self.value is None or self.exact is None:
            return None
        return self.value - self.exact

    @property
    def sound(self) -> bool | None:
        g = self.gap
        if g is None:
            return None
        return g >= 0 if self.kind == UPPER else g <= 0


def noncritical_edges(source: HypergraphSource) -> set[int]:
    """E': edges whose incidence set does not contain every active user."""
    A = source.active
    return {k for k, e in enumerate(source.edges) if e.incidence & A != A}


def _spanning_weight(source: HypergraphSource) -> Fraction:
    A = source.active
    return sum((e.weight for e in source.edges if e.incidence & A == A), ZERO)


def _zero_weight_note(src: HypergraphSource, eprime) -> tuple[str, ...]:
    if any(src.edges[k].weight == 0 for k in eprime) and any(src.edges[k].weight for k in eprime):
        return ("a zero-entropy edge in E' still enters the minimum defining alpha",)
    return ()


def alpha(source: HypergraphSource, lam: FractionalAssignment) -> Fraction:
    """Least lambda-coverage sum_{B >= xi(e)} lambda(B) over e in E' (1 if H(X_E') = 0)."""
    if lam.kind != PARTITION or not validate(lam, source):
        raise ValidationError("alpha needs a valid fractional partition")
    eprime = noncritical_edges(source)
    if sum((source.edges[k].weight for k in eprime), ZERO) == 0:
        return ONE
    return min(
        sum((w for b, w in lam.weights.items() if source.edges[k].incidence & ~b == 0), ZERO)
        for k in eprime
    )


def max_alpha(source: HypergraphSource) -> tuple[Fraction, FractionalAssignment]:
    """max over fractional partitions of alpha, by LP over every B not containing A."""
    src = _prepare(source)
    n, A = src.n, src.active
    eprime = sorted(noncritical_edges(src))
    if sum((src.edges[k].weight for k in eprime), ZERO) == 0:
        return ONE, FractionalAssignment({1 << i: ONE for i in range(n)}, PARTITION)
    family = constrained_subsets(n, A)
    width = len(family) + 1  # lambda(B) for B in family, then t
    rows = []
    for i in range(n):
        coeffs = [ONE if b >> i & 1 else ZERO for b in family] + [ZERO]
        rows.append(Constraint(tuple(coeffs), EQ, ONE, ("vertex", i)))
    for k in eprime:
        inc = src.edges[k].incidence
        coeffs = [ONE if inc & ~b == 0 else ZERO for b in family] + [-ONE]
        rows.append(Constraint(tuple(coeffs), GE, ZERO, ("edge", k)))
    objective = tuple([ZERO] * (width - 1) + [ONE])
    sol = solve(LinearProgram(objective, tuple(rows), "max"))
    if not sol.optimal:
        raise SolverError(f"max-alpha program is {sol.status}")
    lam = FractionalAssignment(dict(zip(family, sol.point[:-1])), PARTITION)
    if alpha(src, lam) != sol.value:
        raise SolverError("max-alpha witness does not reproduce the LP value")
    return sol.value, lam


def _slope_report(name, src, R, a, params, exact, notes=()):
    """H(X_{E\\E'}) + (1/a - 1) R; a = 0 is an unbounded slope, a < 0 not applicable."""
    base = _spanning_weight(src)
    if a == 0:
        return BoundReport(name, None, UNBOUNDED, params, exact, UPPER, notes)
    if a < 0:
        return BoundReport(name, None, NOT_APPLICABLE, params, exact, UPPER, notes)
    return BoundReport(name, base + (ONE / a - ONE) * R, OK, params, exact, UPPER, notes)


def _exact_at(src, R, with_exact):
    return cs_at_rate(src, R).value if with_exact else None


def _check_rate(R) -> Fraction:
    R = Fraction(R)
    if R < 0:
        raise ValidationError("discussion rate must be nonnegative")
    return R


def lamination_bound(source: HypergraphSource, R, with_exact: bool = True) -> BoundReport:
    """H(X_{E\\E'}) + (1/max alpha - 1) R; exact when R <= min_{e in E'} w_e."""
    R = _check_rate(R)
    src = _prepare(source)
    a, lam = max_alpha(src)
    if a <= 0:
        raise SolverError("max alpha vanished; some E' edge is uncoverable")
    eprime = noncritical_edges(src)
    floor = min((src.edges[k].weight for k in eprime), default=None)
    tight = floor is None or R <= floor
    params = {"alpha": a, "lambda": lam, "tight": tight}
    return _slope_report("lamination", src, R, a, params, _exact_at(src, R, with_exact),
                         _zero_weight_note(src, eprime))


def ep_alpha(source: HypergraphSource, partition: Sequence[Mask]) -> Fraction:
    """Closed form alpha(lambda_P) = 1 - (max_e |{C : xi(e) meets C}| - 1)/(|P| - 1)."""
    blocks = check_partition(partition, source.everyone)
    eprime = noncritical_edges(source)
    if sum((source.edges[k].weight for k in eprime), ZERO) == 0:
        return ONE
    worst = max(sum(1 for c in blocks if source.edges[k].incidence & c) for k in eprime)
    return ONE - Fraction(worst - 1, len(blocks) - 1)


def ep_bound(source: HypergraphSource, partition: Sequence[Mask], R, with_exact: bool = True) -> BoundReport:
    """Lamination bound at the partition-induced lambda_P (no helpers)."""
    R = _check_rate(R)
    src = _prepare(source)
    if src.active != src.everyone:
        raise ValidationError("the EP bound is defined for sources without helpers (A = V)")
    lam = lambda_from_partition(partition, src)
    a = ep_alpha(src, partition)
    if a != alpha(src, lam):
        raise SolverError("closed-form EP alpha disagrees with direct evaluation")
    params = {"partition": tuple(partition), "alpha": a}
    return _slope_report("EP", src, R, a, params, _exact_at(src, R, with_exact))


def vertex_packing(source: HypergraphSource) -> tuple[Fraction | None, tuple[Fraction, ...]]:
    """tau = max u(A) s.t. u >= 0 on A (0 on helpers) and u(xi(e)) <= 1 for all e.

    Returns (None, u) when an active user sees no edge, so tau is unbounded;
    u is then the indicator of that user.
    """
    n, A = source.n, source.active
    for i in bits(A):
        if not any(e.incidence >> i & 1 for e in source.edges):
            return None, tuple(ONE if j == i else ZERO for j in range(n))
    bounds = tuple((ZERO, None) if A >> i & 1 else (ZERO, ZERO) for i in range(n))
    rows = tuple(
        Constraint(tuple(ONE if e.incidence >> i & 1 else ZERO for i in range(n)), LE, ONE, k)
        for k, e in enumerate(source.edges)
    )
    sol = solve(LinearProgram(tuple(ONE if A >> i & 1 else ZERO for i in range(n)), rows, "max", bounds))
    if not sol.optimal:
        raise SolverError(f"vertex packing program is {sol.status}")
    return sol.value, sol.point


def vp_bound(source: HypergraphSource, R, with_exact: bool = True) -> BoundReport:
    """H(X_{E\\E'}) + R/(tau - 1) from the packing-weighted lambda_u; needs tau > 1."""
    R = _check_rate(R)
    src = _prepare(source)
    tau, u = vertex_packing(src)
    lam = lambda_from_weights(u, src)
    a = alpha(src, lam)
    exact = _exact_at(src, R, with_exact)
    params = {"tau": tau, "u": u, "alpha": a}
    if tau is None:
        # slope 1/(tau-1) -> 0 as tau -> infinity
        return BoundReport("VP", _spanning_weight(src), OK, params, exact, UPPER,
                           ("an active user sees no edge; tau is unbounded",))
    if a < ONE - ONE / tau:
        raise SolverError(f"alpha(lambda_u) = {a} is below 1 - 1/tau = {ONE - ONE / tau}")
    if tau <= 1:
        return BoundReport("VP", None, NOT_APPLICABLE, params, exact, UPPER)
    return BoundReport("VP", _spanning_weight(src) + R / (tau - ONE), OK, params, exact, UPPER)


def slope_bound(source: HypergraphSource) -> Fraction:
    """(min{d, |A|} - 1) / max{|A| - d, 1}, d the largest E' edge size; 0 when E' is empty."""
    src = _prepare(source)
    eprime = noncritical_edges(src)
    if not eprime:
        return ZERO
    d = max(popcount(src.edges[k].incidence) for k in eprime)
    a = popcount(src.active)
    return Fraction(min(d, a) - 1, max(a - d, 1))


def _helper_setting(source: HypergraphSource, S: Mask):
    if source.has_adversaries:
        raise ValidationError("apply reduce_for_adversaries before evaluating helper-set bounds")
    if S & ~source.everyone:
        raise ValidationError("S is not a subset of the vertices")
    rest = source.everyone & ~S
    if popcount(source.active & rest) < 2:
        raise ValidationError("helper-set bounds need at least two active users outside S")
    return restrict(source, rest, source.active & rest)


def _achieving_rate(source, S, r_K):
    try:
        _, point = rs_at_key_rate(source, r_K)
    except InfeasibleRateError:
        return None
    return sum((point.witness_r[i] for i in bits(S)), ZERO)


def helper_set_bound(source: HypergraphSource, S: Mask, lam: FractionalAssignment, r_K,
                     with_exact: bool = True) -> BoundReport:
    """Lower bound on r(S): (r_K - I_lambda'(Z_{V\\S})) / (sum lambda' - 1), clamped at 0.

    ``lam`` is a fractional partition of the restricted source on V \\ S,
    with masks in that source's vertex order.
    """
    r_K = Fraction(r_K)
    if r_K < 0:
        raise ValidationError("key rate must be nonnegative")
    sub = _helper_setting(source, S)
    if lam.kind != PARTITION or not validate(lam, sub):
        raise ValidationError("lambda' must be a fractional partition of the restricted source")
    total = lam.total()
    if total <= 1:
        raise ValidationError("lambda' must have total weight above 1")
    info = i_lambda(sub, lam)
    value = max(ZERO, (r_K - info) / (total - ONE))
    exact = _achieving_rate(source, S, r_K) if with_exact else None
    params = {"S": S, "lambda": lam, "I_lambda": info}
    return BoundReport("helper-set", value, OK, params, exact, LOWER)


def best_helper_set_bound(source: HypergraphSource, S: Mask, r_K, with_exact: bool = True,
                          limit: int = DEFAULT_PARTITION_LIMIT) -> BoundReport:
    """Largest helper-set bound over lambda' induced by partitions of V \\ S."""
    r_K = Fraction(r_K)
    if r_K < 0:
        raise ValidationError("key rate must be nonnegative")
    sub = _helper_setting(source, S)
    table = cond_entropy_table(sub)
    h_sub = total_entropy(sub)
    best = None
    for part in enumerate_partitions(sub.everyone, limit):
        if any(not c & sub.active for c in part):
            continue
        # I_lambda at lambda_P: H - sum over blocks C of H(Z_{V\C} | Z_C) / (|P| - 1)
        info = h_sub - sum((table[sub.everyone & ~c] for c in part), ZERO) / (len(part) - 1)
        value = max(ZERO, (r_K - info) * (len(part) - 1))
        if best is None or value > best[0]:
            best = (value, part, info)
    value, part, info = best
    exact = _achieving_rate(source, S, r_K) if with_exact else None
    params = {"S": S, "partition": part, "I_lambda": info}
    return BoundReport("helper-set", value, OK, params, exact, LOWER,
                       ("searched partition-induced lambda' only",))
