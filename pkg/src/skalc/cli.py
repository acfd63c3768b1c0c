"""Command-line front end.

Every number is printed exactly ("p/q") next to a 12-significant-digit
decimal; scripts should read the exact field.  Exit codes: 0 ok,
1 verification failures, 2 parse/validation error, 3 size limit,
4 infeasible rate request, 5 internal solver inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import bounds as bnd
from . import capacity as cap
from . import linear_source as lin
from . import verify as ver
from .errors import ENUM_LIMIT_ENV, SkalcError, ValidationError
from .model import HypergraphSource, reduce_for_adversaries
from .partitions import FractionalAssignment, enumerate_partitions
from .serialize import dump_source, fmt_decimal, fmt_exact, load_source, parse_rational, source_to_document

SCHEMA_HELP = """\
source document (JSON):
  {"vertices": ["1", "2", "3"],
   "edges": [{"incident": ["1", "2"], "entropy": "1"}, ...],
   "active": ["1", "2", "3"],          optional, defaults to all vertices
   "untrusted": ["3"],                 optional
   "wiretap_edges": [0]}               optional, 0-based indices into "edges"
linear source over GF(2):
  {"bits": 4, "observers": {"1": ["1000"], ...}, "active": [...]}
  each row is a 0/1 string whose k-th character is the coefficient of bit k.
entropies are exact rationals: integers or "p/q" strings, never floats.
%s overrides the 12-vertex enumeration limit (with a warning).
""" % ENUM_LIMIT_ENV


@dataclass
class Output:
    values: list = field(default_factory=list)   # (label, value)
    tables: list = field(default_factory=list)   # (title, headers, rows)
    notes: list = field(default_factory=list)
    failed: bool = False


def _cell(v) -> str:
    if isinstance(v, Fraction):
        # integers read the same either way
        return fmt_exact(v) if v.denominator == 1 else f"{fmt_exact(v)} ({fmt_decimal(v)})"
    return "" if v is None else str(v)


def render(out: Output, fmt: str) -> str:
    if fmt == "json":
        def conv(v):
            if isinstance(v, Fraction):
                return {"exact": fmt_exact(v), "decimal": fmt_decimal(v)}
            return v

        doc = {
            "values": {k: conv(v) for k, v in out.values},
            "tables": {t: [{h: conv(c) for h, c in zip(hs, row)} for row in rows] for t, hs, rows in out.tables},
            "notes": list(out.notes),
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if out.values:
            w.writerow(["quantity", "exact", "decimal"])
            for k, v in out.values:
                w.writerow([k, fmt_exact(v), fmt_decimal(v)] if isinstance(v, Fraction) else [k, _cell(v), ""])
        for title, hs, rows in out.tables:
            buf.write(f"# {title}\n")
            frac_cols = [j for j in range(len(hs)) if any(isinstance(r[j], Fraction) for r in rows)]
            w.writerow(list(hs) + [f"{hs[j]}_decimal" for j in frac_cols])
            for r in rows:
                cells = [fmt_exact(c) if isinstance(c, Fraction) else _cell(c) for c in r]
                decs = [fmt_decimal(r[j]) if isinstance(r[j], Fraction) else "" for j in frac_cols]
                w.writerow(cells + decs)
        for n in out.notes:
            buf.write(f"# note: {n}\n")
        return buf.getvalue()
    lines = []
    for k, v in out.values:
        if isinstance(v, Fraction) and v.denominator != 1:
            lines.append(f"{k} = {fmt_exact(v)}  (~ {fmt_decimal(v)})")
        else:
            lines.append(f"{k} = {_cell(v)}")
    for title, hs, rows in out.tables:
        lines.append("")
        lines.append(title)
        grid = [list(hs)] + [[_cell(c) for c in r] for r in rows]
        widths = [max(len(row[j]) for row in grid) for j in range(len(hs))]
        for k, row in enumerate(grid):
            lines.append("  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip())
            if k == 0:
                lines.append("  ".join("-" * wd for wd in widths))
    for n in out.notes:
        lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


# -- helpers ------------------------------------------------------------------

def _source(args):
    return load_source(args.input)


def _hypergraph(args) -> HypergraphSource:
    src = _source(args)
    if not isinstance(src, HypergraphSource):
        raise ValidationError(f"'{args.command}' needs a hypergraphical source document")
    return src


def _rate(text, what) -> Fraction:
    q = parse_rational(text)
    if q < 0:
        raise ValidationError(f"{what} must be nonnegative")
    return q


def _set_name(src, mask) -> str:
    return "{" + ",".join(src.names(mask)) + "}"


def _vector_table(src, title, header, vec):
    return (title, ("vertex", header), [(v, q) for v, q in zip(src.vertices, vec)])


def _edge_table(src, x):
    rows = [(k, _set_name(src, e.incidence), e.weight, xk) for k, (e, xk) in enumerate(zip(src.edges, x))]
    return ("edge entropies", ("edge", "incident", "H(X_e)", "x_e"), rows)


def _lambda_table(src, lam: FractionalAssignment, title):
    rows = [(_set_name(src, b), w) for b, w in sorted(lam.weights.items())]
    return (title, ("B", "lambda(B)"), rows)


def _parse_sets(src, text) -> list[int]:
    """'1|2,3' -> [mask {1}, mask {2,3}]."""
    blocks = []
    for part in text.split("|"):
        ids = [t.strip() for t in part.split(",") if t.strip()]
        if not ids:
            raise ValidationError(f"empty block in {text!r}")
        blocks.append(src.mask(ids))
    return blocks


# -- commands -----------------------------------------------------------------

def cmd_rco(args) -> Output:
    src = _source(args)
    if isinstance(src, lin.LinearSource):
        return Output([("R_CO", lin.rco_linear(src))])
    eff = cap.effective_source(src)
    omni = cap.rco(src, args.method)
    out = Output([("R_CO", omni.value)])
    out.tables.append(_vector_table(eff, "omniscience rates", "r_i", omni.rates))
    out.tables.append(_lambda_table(eff, omni.dual, "dual fractional partition"))
    return out


def cmd_cs(args) -> Output:
    src = _source(args)
    if isinstance(src, lin.LinearSource):
        return Output([("C_S", lin.cs_linear(src))])
    return Output([("C_S", cap.cs_unconstrained(src, args.method))])


def _point_output(src, label, point: cap.CapacityPoint) -> Output:
    eff = cap.effective_source(src)
    out = Output([(label, point.value), ("slope", point.slope)])
    out.tables.append(_vector_table(eff, "discussion rates", "r_i", point.witness_r))
    out.tables.append(_edge_table(eff, point.witness_x))
    out.tables.append(_lambda_table(eff, point.witness_lambda, "dual fractional cover"))
    return out


def cmd_cs_at(args) -> Output:
    src = _hypergraph(args)
    R = _rate(args.rate, "--rate")
    point = cap.cs_at_rate(src, R, args.method, strict=args.strict)
    return _point_output(src, f"C_S({fmt_exact(R)})", point)


def cmd_rs_at(args) -> Output:
    src = _hypergraph(args)
    k = _rate(args.key_rate, "--key-rate")
    value, point = cap.rs_at_key_rate(src, k, args.method)
    out = _point_output(src, "key rate x(E) - r(V)", point)
    out.values.insert(0, (f"R_S({fmt_exact(k)})", value))
    return out


def cmd_curve(args) -> Output:
    src = _hypergraph(args)
    curve = cap.capacity_curve(src, args.method)
    rows = [(r, c) for r, c in curve.breakpoints]
    out = Output([("breakpoints", len(rows)), ("R_S at saturation", curve.saturation_rate)])
    out.tables.append(("capacity curve", ("R", "C_S(R)"), rows))
    out.tables.append(("segment slopes", ("from R", "to R", "slope"),
                       [(a[0], b[0], s) for a, b, s in zip(rows, rows[1:], curve.slopes)]))
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["R", "C_S", "R_decimal", "C_S_decimal"])
        for r, c in rows:
            w.writerow([fmt_exact(r), fmt_exact(c), fmt_decimal(r), fmt_decimal(c)])
        Path(args.out).write_text(buf.getvalue())
        out.notes.append(f"curve written to {args.out}")
    return out


def cmd_gk(args) -> Output:
    src = _hypergraph(args)
    return Output([("C_S(0)", cap.gk_zero_rate(src))])


def _report_row(src, rep: bnd.BoundReport):
    params = []
    for k, v in rep.params.items():
        if k in ("lambda", "u"):
            continue
        if k == "partition":
            v = "|".join(",".join(src.names(c)) for c in v)
        elif k == "S":
            v = _set_name(src, v)
        elif isinstance(v, Fraction):
            v = fmt_exact(v)
        params.append(f"{k}={v}")
    return (rep.name, rep.kind, rep.value, rep.status, rep.exact, rep.gap, " ".join(params))


def cmd_bounds(args) -> Output:
    src = cap.effective_source(_hypergraph(args))
    R = _rate(args.rate, "--rate")
    exact = cap.cs_at_rate(src, R, args.method).value
    reports = [bnd.lamination_bound(src, R, with_exact=False), bnd.vp_bound(src, R, with_exact=False)]
    if src.active == src.everyone:
        if args.partition:
            reports += [bnd.ep_bound(src, _parse_sets(src, p), R, with_exact=False) for p in args.partition]
        else:
            best = None
            for part in enumerate_partitions(src.everyone):
                rep = bnd.ep_bound(src, part, R, with_exact=False)
                if rep.value is not None and (best is None or rep.value < best.value):
                    best = rep
            if best is not None:
                reports.append(best)
    elif args.partition:
        raise ValidationError("the EP bound needs A = V")
    rows = [_report_row(src, bnd.BoundReport(r.name, r.value, r.status, r.params, exact, r.kind, r.notes))
            for r in reports]
    out = Output([(f"C_S({fmt_exact(R)})", exact), ("slope bound", bnd.slope_bound(src)),
                  ("1/max alpha - 1", 1 / bnd.max_alpha(src)[0] - 1)])
    if args.helper:
        if args.key_rate is None:
            raise ValidationError("--helper needs --key-rate")
        S = _parse_sets(src, args.helper)[0]
        rep = bnd.best_helper_set_bound(src, S, _rate(args.key_rate, "--key-rate"))
        rows.append(_report_row(src, rep))
        out.notes.extend(rep.notes)
    if args.rates:
        caps = [None if t.strip() in ("inf", "-") else _rate(t, "--rates") for t in args.rates.split(",")]
        value = cap.cs_vector_rate_upper_bound(src, caps, args.method)
        rows.append(("vector-rate BOUND", "upper", value, "ok", None, None, "rates=" + args.rates))
        out.notes.append("the vector-rate figure is an upper BOUND on C_S(r_V), not the capacity")
    out.tables.append(("bounds", ("bound", "kind", "value", "status", "exact", "gap", "parameters"), rows))
    return out


def cmd_reduce(args) -> Output:
    src = _hypergraph(args)
    reduced = reduce_for_adversaries(src)
    if args.out:
        dump_source(reduced, args.out)
        return Output([("vertices", reduced.n), ("edges", len(reduced.edges))],
                      notes=[f"reduced source written to {args.out}"])
    sys.stdout.write(json.dumps(source_to_document(reduced), indent=2) + "\n")
    return Output()


def cmd_counterexample(args) -> Output:
    rep = lin.counterexample_report()
    out = Output([
        ("H(Z_V)", rep.total_entropy),
        ("R_CO", rep.rco),
        ("C_S", rep.cs),
        ("R_S upper bound (omniscience)", rep.rs_upper),
        ("rho(W) at W=(a,b,c)", rep.rho_abc),
        ("R_S lower bound at W=(a,b,c), r_K=C_S", rep.bound_at_abc),
        ("vector-rate bound at W=(a,b,c), uncapped", rep.theorem1_at_abc),
        ("least R_S lower bound over tested W", rep.best_bound),
        ("subspaces tested", rep.subspaces_tested),
    ])
    out.notes.append(rep.restriction)
    out.notes.append("users: 1=a, 2=b, 3=c, 4=(a,b,d), 5=(a,b,c+d) over uniform bits a,b,c,d")
    return out


def cmd_verify(args) -> Output:
    base = dict(seed=args.seed, count=args.instances)
    plain = ver.RandomEnsembleSpec(**base)
    sweeps = [
        ver.duality_sweep(plain, args.dump_dir),
        ver.shearer_sweep(plain, args.dump_dir),
        ver.shearer_sweep(ver.RandomEnsembleSpec(independent=True, **base), args.dump_dir),
        ver.equivalence_sweep(plain, args.dump_dir),
        ver.achievability_sweep(plain, args.dump_dir),
        ver.zero_rate_sweep(plain, args.dump_dir),
        ver.adversary_sweep(ver.RandomEnsembleSpec(adversaries=True, **base), args.dump_dir),
        ver.bounds_sweep(plain, args.dump_dir),
        ver.helper_set_sweep(plain, args.dump_dir),
        ver.excess_form_sweep(plain, args.dump_dir),
    ]
    rows = [(s.name, s.instances, s.checks, len(s.failures), "PASS" if s.ok else "FAIL") for s in sweeps]
    out = Output(tables=[("verification sweeps", ("sweep", "instances", "checks", "failures", "status"), rows)])
    for s in sweeps:
        for f in s.failures[:5]:
            out.notes.append(f"{s.name} #{f.index} (seed {f.seed}): {f.message}" + (f" -> {f.dump}" if f.dump else ""))
    out.failed = any(not s.ok for s in sweeps)
    return out


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="skalc",
        description="Exact secret-key capacity and communication complexity for hypergraphical sources.",
        epilog=SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, needs_input=True):
        sp = sub.add_parser(name, help=help, description=help, epilog=SCHEMA_HELP,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        if needs_input:
            sp.add_argument("--input", "-i", required=True, help="source document (JSON)")
            sp.add_argument("--method", choices=(cap.LAZY, cap.EAGER), default=cap.LAZY,
                            help="cutting planes (lazy) or every subset row up front (eager)")
        sp.add_argument("--format", choices=("table", "csv", "json"), default="table")
        sp.set_defaults(func=func)
        return sp

    add("rco", cmd_rco, "smallest total rate for communication for omniscience")
    add("cs", cmd_cs, "unconstrained secrecy capacity")
    sp = add("cs-at", cmd_cs_at, "secrecy capacity at a total discussion rate")
    sp.add_argument("--rate", required=True, help="total discussion rate R (rational)")
    sp.add_argument("--strict", action="store_true", help="also impose r_i >= 0")
    sp = add("rs-at", cmd_rs_at, "communication complexity at a key rate")
    sp.add_argument("--key-rate", required=True, help="key rate r_K (rational)")
    sp = add("curve", cmd_curve, "all breakpoints of R -> C_S(R)")
    sp.add_argument("--out", help="write the curve as CSV (exact and decimal columns)")
    add("gk", cmd_gk, "zero-rate capacity: entropy of the edges every active user sees")
    sp = add("bounds", cmd_bounds, "lamination, EP, VP, slope and helper-set bounds")
    sp.add_argument("--rate", required=True, help="total discussion rate R")
    sp.add_argument("--partition", action="append",
                    help="EP partition, blocks separated by '|' and ids by ',' (repeatable)")
    sp.add_argument("--helper", help="vertex set S for the helper-set bound, ids separated by ','")
    sp.add_argument("--key-rate", help="key rate for the helper-set bound")
    sp.add_argument("--rates", help="individual rate caps r_i in vertex order ('inf' = uncapped)")
    sp = add("reduce", cmd_reduce, "remove untrusted helpers and wiretapped edges")
    sp.add_argument("--out", help="write the reduced source document here (default: stdout)")
    add("counterexample", cmd_counterexample, "the five-user binary linear source with a loose R_S bound",
        needs_input=False)
    sp = add("verify", cmd_verify, "seeded randomized oracle sweeps", needs_input=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--instances", type=int, default=50)
    sp.add_argument("--dump-dir", help="write failing sources here as source documents")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except SkalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text = render(out, args.format)
    if out.values or out.tables or out.notes:
        sys.stdout.write(text)
    return 1 if out.failed else 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
