"""Exact linear algebra for placeholder-parameter systems.

Several proof steps reduce to solving a linear system over the rationals:
"for which coefficients c_k does this symbolic expression vanish
identically?".  The pattern is always the same: inject placeholder
parameters ``_c_<name>`` into a scalar or operator expression, expand,
group the numerator monomials that are not placeholders, and read each
group as one linear equation in the placeholders.  This module holds that
machinery: row extraction from operators, Gaussian elimination over
Fraction, nullspace and particular-solution drivers.
"""
from __future__ import annotations

import collections
from fractions import Fraction

from . import symexpr as S
from . import diffop as DO

__all__ = [
    "PLACEHOLDER_PREFIX",
    "placeholder",
    "operator_rows",
    "nullspace",
    "particular_solution",
    "solve_combo",
]

PLACEHOLDER_PREFIX = "_c_"


def placeholder(name: str):
    """Scalar placeholder parameter for the unknown coefficient ``name``."""
    return S.param(PLACEHOLDER_PREFIX + name)


def operator_rows(C: dict, names: list, constraints=None) -> list:
    """Linear rows [A | b] from an operator whose coefficients are linear in
    the placeholders.  Each row groups one (derivative multi-index,
    placeholder-free monomial, denominator) signature; the placeholder-free
    part of the coefficient lands in the right-hand column b with opposite
    sign, so a solution c satisfies A c = b, i.e. the operator vanishes.
    """
    idx = {n: i for i, n in enumerate(names)}
    width = len(names) + 1
    rows: dict = collections.defaultdict(lambda: [Fraction(0)] * width)
    for mi, sc in C.items():
        num = sc.num
        if constraints is not None:
            num = constraints.reduce_poly(num)
        den = tuple(sorted(sc.den.items(), key=repr))
        for mono, cf in num.items():
            pk = None
            rest = []
            for v, e in mono:
                if v[0] == "p" and v[1].startswith(PLACEHOLDER_PREFIX):
                    if e != 1 or pk is not None:
                        raise ValueError("expression is nonlinear in placeholders")
                    pk = v[1][len(PLACEHOLDER_PREFIX):]
                else:
                    rest.append((v, e))
            key = (mi, tuple(rest), den)
            row = rows[key]
            if pk is None:
                row[-1] -= cf
            else:
                row[idx[pk]] += cf
    return [rows[k] for k in sorted(rows, key=repr)]


def _eliminate(rows: list, ncols: int):
    """In-place Gaussian elimination; returns (reduced rows, pivot map)."""
    m = [row[:] for row in rows]
    pivots: dict = {}
    rank = 0
    for c in range(ncols):
        pr = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[rank], m[pr] = m[pr], m[rank]
        pv = m[rank][c]
        m[rank] = [v / pv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        pivots[c] = rank
        rank += 1
        if rank == len(m):
            break
    return m, pivots


def nullspace(rows: list, names: list) -> list:
    """Basis of the homogeneous nullspace (the right-hand column is ignored;
    it must be zero for a genuinely homogeneous system).  Returns a list of
    {name: Fraction} dicts, deterministic in the order of ``names``."""
    ncols = len(names)
    m, pivots = _eliminate([row[:ncols] + [Fraction(0)] for row in rows], ncols)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for c, rr in pivots.items():
            vec[c] = -m[rr][fc]
        out.append({names[i]: vec[i] for i in range(ncols) if vec[i] != 0})
    return out


def particular_solution(rows: list, names: list):
    """A particular solution of A c = b, or None if inconsistent."""
    ncols = len(names)
    m, pivots = _eliminate(rows, ncols)
    for row in m:
        if row[-1] != 0 and all(v == 0 for v in row[:ncols]):
            return None
    sol = {n: Fraction(0) for n in names}
    for c, rr in pivots.items():
        sol[names[c]] = m[rr][-1]
    return sol


def solve_combo(H: dict, cands: dict, constraints=None) -> list:
    """All rational combinations Q = sum c_k B_k with [H, Q] = 0.

    ``cands`` maps names to operator dicts (or operator-grammar strings,
    parsed with H bound).  Returns nullspace dicts {name: Fraction},
    deterministically ordered.
    """
    from . import grammar as G

    ops = {}
    for k, v in cands.items():
        ops[k] = v if isinstance(v, dict) else G.parse_operator(v, hamiltonian=H)
    Q = DO.zero_op()
    names = sorted(cands)
    for k in names:
        Q = DO.op_add(Q, DO.op_scale(ops[k], placeholder(k)))
    C = DO.commutator(H, Q)
    rows = operator_rows(C, names, constraints=constraints)
    for row in rows:
        if row[-1] != 0:
            raise ValueError("candidate system is not homogeneous")
    return nullspace(rows, names)
