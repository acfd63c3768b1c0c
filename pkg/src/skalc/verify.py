"""Brute-force oracles and seeded randomized sweeps.

The oracles here build every LP with all subset rows written out from
``edges_within`` directly; they share only the simplex engine with the
main solvers.  Any sweep failure dumps the offending source as a JSON
document that the CLI accepts, named after the ensemble seed and index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

from .capacity import (
    cs_at_rate, cs_unconstrained, gk_zero_rate, optimal_reduced_source, rco, rs_at_key_rate,
)
from .errors import SkalcError, ValidationError, check_vertex_count
from .exactlp import GE, LE, Constraint, LinearProgram, LpSolution, solve
from .model import HypergraphSource, Mask, edges_within, popcount, reduce_for_adversaries, total_entropy
from .partitions import enumerate_partitions, i_lambda, lambda_from_partition, mmi, validate
from .serialize import dump_source

ZERO, ONE = Fraction(0), Fraction(1)
PROGRAMS = ("rco", "cs_at_rate", "rs_at_key_rate", "rs_excess_form", "cs_at_rate_masked")


@dataclass(frozen=True)
class RandomEnsembleSpec:
    """Recipe for a reproducible ensemble of small hypergraphical sources.

    ``active``: "all" (A = V), "random" (random A with |A| >= 2) or "mixed"
    (alternating).  ``independent`` makes every edge a singleton, so users
    observe independent variables.  ``adversaries`` adds a nonempty
    untrusted helper set D and wiretap set whenever there is room.
    """

    seed: int = 0
    count: int = 200
    n_range: tuple[int, int] = (2, 6)
    e_range: tuple[int, int] = (1, 10)
    max_degree: int | None = None
    max_numerator: int = 4
    max_denominator: int = 3
    active: str = "mixed"
    independent: bool = False
    adversaries: bool = False

    def __post_init__(self):
        lo, hi = self.n_range
        if not 2 <= lo <= hi:
            raise ValidationError("vertex range must satisfy 2 <= low <= high")
        check_vertex_count(hi)
        if not 0 <= self.e_range[0] <= self.e_range[1]:
            raise ValidationError("edge range must satisfy 0 <= low <= high")
        if self.active not in ("all", "random", "mixed"):
            raise ValidationError(f"unknown active-set policy {self.active!r}")
        if self.adversaries and hi < 3:
            raise ValidationError("adversarial ensembles need at least three vertices")


def instance_seed(seed: int, index: int) -> int:
    return (seed & (2**64 - 1)) * 1_000_003 + index


def random_source(spec: RandomEnsembleSpec, index: int) -> HypergraphSource:
    rng = random.Random(instance_seed(spec.seed, index))
    lo, hi = spec.n_range
    if spec.adversaries:
        lo = max(lo, 3)
    n = rng.randint(lo, hi)
    names = [f"v{k}" for k in range(n)]
    top = n if spec.max_degree is None else min(spec.max_degree, n)
    edges = []
    for _ in range(rng.randint(*spec.e_range)):
        size = 1 if spec.independent else rng.randint(1, top)
        inc = rng.sample(names, size)
        w = Fraction(rng.randint(0, spec.max_numerator), rng.randint(1, spec.max_denominator))
        edges.append((inc, w))
    policy = spec.active
    if policy == "mixed":
        policy = "all" if index % 2 == 0 else "random"
    if spec.adversaries:
        k = rng.randint(2, n - 1)
    elif policy == "all":
        k = n
    else:
        k = rng.randint(2, n)
    active = rng.sample(names, k)
    untrusted, wiretap = [], []
    if spec.adversaries:
        helpers = [v for v in names if v not in active]
        untrusted = rng.sample(helpers, rng.randint(1, len(helpers)))
        if edges:
            wiretap = sorted(rng.sample(range(len(edges)), rng.randint(1, len(edges))))
    return HypergraphSource.build(names, edges, active, untrusted, wiretap)


def ensemble(spec: RandomEnsembleSpec) -> Iterator[tuple[int, HypergraphSource]]:
    for index in range(spec.count):
        yield index, random_source(spec, index)


# -- eager oracle -----------------------------------------------------------

def _all_rows(source: HypergraphSource) -> list[Mask]:
    A = source.active
    return [b for b in range(1, 1 << source.n) if b & A != A]


def eager_lp(source: HypergraphSource, program: str, R=None, r_K=None) -> LpSolution:
    """Full-constraint LP for ``program``, every row B not containing A written out.

    Adversary designations are ignored except by ``cs_at_rate_masked``,
    which keeps every vertex and forces x_e = 0 on edges that are
    wiretapped or touch an untrusted helper.
    """
    check_vertex_count(source.n)
    if program not in PROGRAMS:
        raise ValidationError(f"unknown program {program!r}")
    n, m = source.n, len(source.edges)
    family = _all_rows(source)
    if program == "rco":
        rows = []
        for b in family:
            rhs = sum((source.edges[k].weight for k in edges_within(source, b)), ZERO)
            rows.append(Constraint(tuple(ONE if b >> i & 1 else ZERO for i in range(n)), GE, rhs, b))
        return solve(LinearProgram(tuple([ONE] * n), tuple(rows), "min", ((None, None),) * n))

    def subset_row(b):
        inside = edges_within(source, b)
        return Constraint(
            tuple(ONE if b >> i & 1 else ZERO for i in range(n))
            + tuple(-ONE if k in inside else ZERO for k in range(m)),
            GE, ZERO, b)

    rows = [subset_row(b) for b in family]
    caps = [(ZERO, e.weight) for e in source.edges]
    if program == "cs_at_rate_masked":
        for k, e in enumerate(source.edges):
            if k in source.wiretap or e.incidence & source.untrusted:
                caps[k] = (ZERO, ZERO)
    bounds = ((None, None),) * n + tuple(caps)
    rate_row = tuple([ONE] * n + [ZERO] * m)
    key_row = tuple([-ONE] * n + [ONE] * m)
    if program in ("cs_at_rate", "cs_at_rate_masked"):
        rows.append(Constraint(rate_row, LE, Fraction(R), "total"))
        return solve(LinearProgram(tuple([-ONE] * n + [ONE] * m), tuple(rows), "max", bounds))
    rows.append(Constraint(key_row, GE, Fraction(r_K), "key"))
    if program == "rs_at_key_rate":
        return solve(LinearProgram(rate_row, tuple(rows), "min", bounds))
    # min x(E) - r_K, the constant dropped from the objective
    sol = solve(LinearProgram(tuple([ZERO] * n + [ONE] * m), tuple(rows), "min", bounds))
    if sol.optimal:
        return LpSolution(sol.status, sol.value - Fraction(r_K), sol.point, sol.duals, sol.pivots)
    return sol


# -- checks -----------------------------------------------------------------

def partition_duality_check(source: HypergraphSource) -> bool:
    """rco primal = dual partition objective, dual validates, and (A = V) C_S = mmi."""
    omni = rco(source)
    table_value = sum(
        (w * sum((source.edges[k].weight for k in edges_within(source, b)), ZERO)
         for b, w in omni.dual.weights.items()), ZERO)
    if table_value != omni.value or not validate(omni.dual, source):
        return False
    if source.active == source.everyone:
        return total_entropy(source) - omni.value == mmi(source)[0]
    return True


@dataclass
class Failure:
    index: int
    seed: int
    message: str
    dump: Path | None = None


@dataclass
class SweepReport:
    name: str
    instances: int = 0
    checks: int = 0
    failures: list[Failure] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else f"FAIL ({len(self.failures)} failures)"
        return f"{self.name}: {self.instances} instances, {self.checks} checks, {status}"


def _fail(report: SweepReport, spec: RandomEnsembleSpec, index, source, message, dump_dir):
    path = None
    if dump_dir is not None:
        path = dump_source(source, Path(dump_dir) / f"{report.name}-seed{spec.seed}-{index}.json")
    report.failures.append(Failure(index, instance_seed(spec.seed, index), message, path))


def run_sweep(name: str, spec: RandomEnsembleSpec, check: Callable[[HypergraphSource, SweepReport], list[str]],
              dump_dir=None) -> SweepReport:
    """Apply ``check`` (returning failure messages) to every ensemble member."""
    report = SweepReport(name)
    for index, source in ensemble(spec):
        report.instances += 1
        try:
            problems = check(source, report)
        except SkalcError as exc:
            problems = [f"{type(exc).__name__}: {exc}"]
        for msg in problems:
            _fail(report, spec, index, source, msg, dump_dir)
    return report


def _has_pair(source: HypergraphSource) -> bool:
    return popcount(source.active) >= 2


def shearer_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """I_lambda >= 0 for every partition-induced lambda; records the smallest value seen."""
    values: list[Fraction] = []

    def check(source, report):
        problems = []
        for part in enumerate_partitions(source.everyone):
            if any(not c & source.active for c in part):
                continue
            v = i_lambda(source, lambda_from_partition(part, source))
            report.checks += 1
            values.append(v)
            if v < 0:
                problems.append(f"I_lambda = {v} < 0 at partition {part}")
        return problems

    report = run_sweep("shearer", spec, check, dump_dir)
    report.extra["min"] = min(values, default=None)
    report.extra["values"] = len(values)
    return report


def rate_grid(cap: Fraction) -> list[Fraction]:
    return [ZERO, cap / 4, cap / 2, 3 * cap / 4, cap, 2 * cap]


def achievability_sweep(spec: RandomEnsembleSpec, dump_dir=None, grid=rate_grid) -> SweepReport:
    """At each grid rate: C_S(reduced) = C_S(R) and R_CO(reduced) <= R."""

    def check(source, report):
        if not _has_pair(source):
            return []
        problems = []
        cap = cs_unconstrained(source)
        for R in grid(cap):
            red = optimal_reduced_source(source, R)
            report.checks += 1
            target = cs_at_rate(source, R).value
            if red.capacity != target or red.omniscience_rate > R:
                problems.append(f"R={R}: C_S[Z']={red.capacity} vs {target}, R_CO[Z']={red.omniscience_rate}")
        return problems

    return run_sweep("achievability", spec, check, dump_dir)


def equivalence_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """Lazy solves equal the eager oracle for R_CO, C_S(R) on the grid, and R_S(C_S)."""

    def check(source, report):
        if not _has_pair(source):
            return []
        problems = []
        lazy = rco(source).value
        eager = eager_lp(source, "rco").value
        report.checks += 1
        if lazy != eager:
            problems.append(f"rco lazy {lazy} != eager {eager}")
        cap = total_entropy(source) - eager
        for R in rate_grid(cap):
            a = cs_at_rate(source, R).value
            b = eager_lp(source, "cs_at_rate", R=R).value
            report.checks += 1
            if a != b:
                problems.append(f"C_S({R}) lazy {a} != eager {b}")
        a = rs_at_key_rate(source, cap)[0]
        b = eager_lp(source, "rs_at_key_rate", r_K=cap).value
        report.checks += 1
        if a != b:
            problems.append(f"R_S({cap}) lazy {a} != eager {b}")
        return problems

    return run_sweep("equivalence", spec, check, dump_dir)


def duality_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    def check(source, report):
        if not _has_pair(source):
            return []
        report.checks += 1
        return [] if partition_duality_check(source) else ["partition duality check failed"]

    return run_sweep("duality", spec, check, dump_dir)


def zero_rate_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """C_S(0) equals the weight of the edges seen by every active user."""

    def check(source, report):
        if not _has_pair(source):
            return []
        report.checks += 1
        A = source.active
        direct = sum((e.weight for e in source.edges if e.incidence & A == A), ZERO)
        at_zero = cs_at_rate(source, 0).value
        gk = gk_zero_rate(source)
        return [] if at_zero == gk == direct else [f"C_S(0)={at_zero}, gk={gk}, direct={direct}"]

    return run_sweep("zero-rate", spec, check, dump_dir)


def adversary_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """With D and wiretap edges: original = reduced = masked full-vertex oracle on the C_S grid."""

    def check(source, report):
        reduced = reduce_for_adversaries(source)
        if not _has_pair(reduced):
            return []
        problems = []
        for R in rate_grid(cs_unconstrained(reduced)):
            a = cs_at_rate(source, R).value
            b = cs_at_rate(reduced, R).value
            c = eager_lp(source, "cs_at_rate_masked", R=R).value
            report.checks += 1
            if not a == b == c:
                problems.append(f"R={R}: original {a}, reduced {b}, masked oracle {c}")
        return problems

    return run_sweep("adversary", spec, check, dump_dir)


def excess_form_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """min r(V) with the key-rate row equals min x(E) - r_K over the same set."""

    def check(source, report):
        if not _has_pair(source):
            return []
        problems = []
        cap = cs_unconstrained(source)
        for k in (ZERO, cap / 3, cap / 2, cap):
            a = rs_at_key_rate(source, k)[0]
            b = eager_lp(source, "rs_excess_form", r_K=k).value
            report.checks += 1
            if a != b:
                problems.append(f"r_K={k}: min r(V) {a} != min x(E)-r_K {b}")
        return problems

    return run_sweep("rs-forms", spec, check, dump_dir)


def bound_grid(source: HypergraphSource) -> list[Fraction]:
    """{0, m/2, m, R_CO, 2 R_CO} with m the least E' edge entropy (R_CO when E' is empty)."""
    from .bounds import noncritical_edges

    omni = rco(source).value
    eprime = noncritical_edges(source)
    m = min((source.edges[k].weight for k in eprime), default=omni)
    return [ZERO, m / 2, m, omni, 2 * omni]


def bounds_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """Upper bounds dominate C_S(R); lamination is exact in its tight regime; slope check."""
    from .bounds import ep_bound, lamination_bound, max_alpha, slope_bound, vp_bound

    def check(source, report):
        if not _has_pair(source):
            return []
        problems = []
        src = reduce_for_adversaries(source)
        a, _ = max_alpha(src)
        report.checks += 1
        if slope_bound(src) < 1 / a - 1:
            problems.append(f"slope bound {slope_bound(src)} < 1/alpha - 1 = {1 / a - 1}")
        parts = []
        if src.active == src.everyone:
            parts = list(enumerate_partitions(src.everyone))
        for R in bound_grid(src):
            exact = cs_at_rate(src, R).value
            lam = lamination_bound(src, R, with_exact=False)
            report.checks += 1
            if lam.value < exact:
                problems.append(f"lamination {lam.value} < C_S({R}) = {exact}")
            if lam.params["tight"] and lam.value != exact:
                problems.append(f"lamination {lam.value} != C_S({R}) = {exact} in the tight regime")
            vp = vp_bound(src, R, with_exact=False)
            report.checks += 1
            if vp.value is not None and vp.value < exact:
                problems.append(f"VP {vp.value} < C_S({R}) = {exact}")
            for part in parts:
                ep = ep_bound(src, part, R, with_exact=False)
                report.checks += 1
                if ep.value is not None and ep.value < exact:
                    problems.append(f"EP {ep.value} < C_S({R}) = {exact} at {part}")
        return problems

    return run_sweep("bounds", spec, check, dump_dir)


def helper_set_sweep(spec: RandomEnsembleSpec, dump_dir=None) -> SweepReport:
    """Best partition-induced helper-set bound never exceeds r(S) of an R_S-optimal witness."""
    from .bounds import best_helper_set_bound

    def check(source, report):
        src = reduce_for_adversaries(source)
        if not _has_pair(src):
            return []
        problems = []
        cap = cs_unconstrained(src)
        for r_K in (cap / 2, cap):
            r = rs_at_key_rate(src, r_K)[1].witness_r
            for S in range(1, src.everyone):
                if popcount(src.active & ~S) < 2:
                    continue
                hs = best_helper_set_bound(src, S, r_K, with_exact=False)
                used = sum((r[i] for i in range(src.n) if S >> i & 1), ZERO)
                report.checks += 1
                if hs.value > used:
                    problems.append(f"helper-set bound {hs.value} > r(S) = {used} for S={S}, r_K={r_K}")
        return problems

    return run_sweep("helper-set", spec, check, dump_dir)
