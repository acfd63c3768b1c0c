"""JSON source documents (see SCHEMA.md) and exact/decimal number rendering."""

from __future__ import annotations

import json
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .errors import ValidationError
from .linear_source import LinearSource
from .model import HypergraphSource, as_fraction


def fmt_exact(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_decimal(q: Fraction, digits: int = 12) -> str:
    """``q`` rounded to ``digits`` significant digits, without exponent notation."""
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(q.numerator) / Decimal(q.denominator)
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise ValidationError(f"{text!r} is not a rational")
    if isinstance(text, str):
        text = text.strip()
    return as_fraction(text)


def _ids(values, what) -> list[str]:
    if not isinstance(values, list):
        raise ValidationError(f"{what} must be a list of ids")
    return [str(v) for v in values]


def source_from_document(doc: dict) -> HypergraphSource | LinearSource:
    if not isinstance(doc, dict):
        raise ValidationError("source document must be a JSON object")
    if "bits" in doc:
        return _linear_from_document(doc)
    for key in ("vertices", "edges"):
        if key not in doc:
            raise ValidationError(f"source document lacks {key!r}")
    vertices = _ids(doc["vertices"], "vertices")
    edges = []
    for k, e in enumerate(doc["edges"]):
        if not isinstance(e, dict) or "incident" not in e or "entropy" not in e:
            raise ValidationError(f"edge {k} needs 'incident' and 'entropy'")
        edges.append((_ids(e["incident"], f"edge {k} incidence"), parse_rational(e["entropy"])))
    active = doc.get("active")
    wiretap = doc.get("wiretap_edges", [])
    if not isinstance(wiretap, list) or any(isinstance(k, bool) or not isinstance(k, int) for k in wiretap):
        raise ValidationError("wiretap_edges must be a list of 0-based edge indices")
    return HypergraphSource.build(
        vertices,
        edges,
        None if active is None else _ids(active, "active"),
        _ids(doc.get("untrusted", []), "untrusted"),
        wiretap,
    )


def _linear_from_document(doc: dict) -> LinearSource:
    m = doc["bits"]
    if isinstance(m, bool) or not isinstance(m, int):
        raise ValidationError("'bits' must be an integer")
    observers = doc.get("observers")
    if not isinstance(observers, dict):
        raise ValidationError("linear source needs an 'observers' object")
    active = doc.get("active")
    return LinearSource.build(m, observers, None if active is None else _ids(active, "active"),
                              doc.get("wiretap"))


def load_source(path: str | Path) -> HypergraphSource | LinearSource:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    return source_from_document(doc)


def row_string(row: int, m: int) -> str:
    return "".join("1" if row >> j & 1 else "0" for j in range(m))


def source_to_document(source: HypergraphSource | LinearSource) -> dict:
    if isinstance(source, LinearSource):
        doc = {
            "bits": source.m,
            "observers": {u: [row_string(r, source.m) for r in mat]
                          for u, mat in zip(source.users, source.matrices)},
            "active": [source.users[i] for i in range(source.n) if source.active >> i & 1],
        }
        if source.wiretap is not None:
            doc["wiretap"] = [row_string(r, source.m) for r in source.wiretap]
        return doc
    doc = {
        "vertices": list(source.vertices),
        "edges": [{"incident": list(source.names(e.incidence)), "entropy": fmt_exact(e.weight)}
                  for e in source.edges],
        "active": list(source.names(source.active)),
    }
    if source.untrusted:
        doc["untrusted"] = list(source.names(source.untrusted))
    if source.wiretap:
        doc["wiretap_edges"] = sorted(source.wiretap)
    return doc


def dump_source(source, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(source_to_document(source), indent=2) + "\n")
    return path
