"""Independent reference computations used to derive frozen test values.

Nothing here touches the simplex engine: LPs are solved by enumerating
every basic solution (each choice of n linearly independent tight rows),
and linear-source entropies by counting images over all 2^m inputs.
Only usable on tiny instances.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

ZERO, ONE = Fraction(0), Fraction(1)


def _solve_square(rows, rhs):
    """Gauss-Jordan over Fractions; None if singular."""
    n = len(rows)
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((k for k in range(c, n) if M[k][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for k in range(n):
            if k != c and M[k][c] != 0:
                f = M[k][c]
                M[k] = [a - f * b for a, b in zip(M[k], M[c])]
    return [M[k][n] for k in range(n)]


def vertex_lp(objective, rows, sense="max"):
    """Optimum of objective.x over {x : a.x (<=|>=|==) b}, by vertex enumeration.

    ``rows`` are (coeffs, rel, rhs); variable bounds must be given as rows.
    Assumes the optimum is attained at a vertex (pointed, bounded).
    """
    n = len(objective)
    best = None
    eqs = [r for r in rows if r[1] == "=="]
    ineqs = [r for r in rows if r[1] != "=="]
    need = n - len(eqs)
    for extra in combinations(range(len(ineqs)), need):
        chosen = eqs + [ineqs[k] for k in extra]
        x = _solve_square([[Fraction(a) for a in r[0]] for r in chosen], [Fraction(r[2]) for r in chosen])
        if x is None:
            continue
        ok = True
        for coeffs, rel, rhs in rows:
            act = sum(Fraction(a) * v for a, v in zip(coeffs, x))
            if (rel == "<=" and act > rhs) or (rel == ">=" and act < rhs) or (rel == "==" and act != rhs):
                ok = False
                break
        if not ok:
            continue
        val = sum(Fraction(c) * v for c, v in zip(objective, x))
        if best is None or (val > best if sense == "max" else val < best):
            best = val
    return best


def _inside(incidences, b):
    return [k for k, inc in enumerate(incidences) if inc & ~b == 0]


def rco_oracle(n, active, edges):
    """edges: list of (mask, weight)."""
    incs = [m for m, _ in edges]
    rows = []
    for b in range(1, 1 << n):
        if b & active == active:
            continue
        rhs = sum((edges[k][1] for k in _inside(incs, b)), ZERO)
        rows.append(([1 if b >> i & 1 else 0 for i in range(n)], ">=", rhs))
    return vertex_lp([1] * n, rows, "min")


def cs_at_rate_oracle(n, active, edges, R):
    m = len(edges)
    incs = [mk for mk, _ in edges]
    rows = []
    for b in range(1, 1 << n):
        if b & active == active:
            continue
        inside = set(_inside(incs, b))
        rows.append(([1 if b >> i & 1 else 0 for i in range(n)] + [-1 if k in inside else 0 for k in range(m)], ">=", 0))
    rows.append(([1] * n + [0] * m, "<=", R))
    for k, (_, w) in enumerate(edges):
        e = [0] * (n + m)
        e[n + k] = 1
        rows.append((e, ">=", 0))
        rows.append((e, "<=", w))
    return vertex_lp([-1] * n + [1] * m, rows, "max")


def max_alpha_oracle(n, active, edges):
    """max t s.t. lambda is a fractional partition and every E' edge has coverage >= t."""
    eprime = [mk for mk, w in edges if mk & active != active]
    fam = [b for b in range(1, 1 << n) if b & active != active]
    width = len(fam) + 1
    rows = []
    for i in range(n):
        rows.append(([1 if b >> i & 1 else 0 for b in fam] + [0], "==", 1))
    for inc in eprime:
        rows.append(([1 if inc & ~b == 0 else 0 for b in fam] + [-1], ">=", 0))
    for j in range(len(fam)):
        e = [0] * width
        e[j] = 1
        rows.append((e, ">=", 0))
    return vertex_lp([0] * len(fam) + [1], rows, "max")


def image_entropy(m, rows):
    """H(f(X)) in bits for X uniform on GF(2)^m and f given by int rows: log2 |image|."""
    images = set()
    for x in range(1 << m):
        images.add(tuple(bin(r & x).count("1") & 1 for r in rows))
    h = math.log2(len(images))
    assert h == int(h)
    return Fraction(int(h))


def distribution_cmi(m, w_rows, z_rows_b, z_rows_rest):
    """I(W ^ Z_B | Z_rest) from image counts: H(W,R) + H(B,R) - H(W,B,R) - H(R)."""
    H = lambda rows: image_entropy(m, rows)  # noqa: E731
    return H(w_rows + z_rows_rest) + H(z_rows_b + z_rows_rest) - H(w_rows + z_rows_b + z_rows_rest) - H(z_rows_rest)


def all_bit_patterns(k):
    return list(product((0, 1), repeat=k))
