"""Scratch helper: solve for integral combinations by exact linear algebra.

Given a Hamiltonian and a dict of candidate operators, find all rational
combinations Q = sum c_k B_k with [H, Q] = 0.  Placeholder parameters _c<k>
are injected, the commutator's numerator monomials are grouped by their
non-placeholder part, and the resulting homogeneous system is solved by
Gaussian elimination over Q.
"""
from fractions import Fraction
import collections

from pdmverify import symexpr as S
from pdmverify import grammar as G
from pdmverify import diffop as DO


def solve_combo(H, cands, constraints=None, verbose=True):
    ops = {}
    for k, v in cands.items():
        ops[k] = v if isinstance(v, dict) else G.parse_operator(v, hamiltonian=H)
    Q = DO.zero_op()
    for k, op in ops.items():
        Q = DO.op_add(Q, DO.op_scale(op, S.param("_c_" + k)))
    C = DO.commutator(H, Q)

    rows = collections.defaultdict(dict)
    names = sorted(cands)
    for mi, sc in C.items():
        num = sc.num
        if constraints is not None:
            num = constraints.reduce_poly(num)
        den = tuple(sorted(sc.den.items()))
        for mono, cf in num.items():
            pk = None
            rest = []
            for v, e in mono:
                if v[0] == "p" and v[1].startswith("_c_"):
                    pk = v[1][3:]
                else:
                    rest.append((v, e))
            key = (mi, tuple(rest), den)
            rows[key][pk] = rows[key].get(pk, Fraction(0)) + cf

    M = [[row.get(n, Fraction(0)) for n in names] for row in rows.values()]
    ncols = len(names)
    pivots = {}
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                fac = M[i][c]
                M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    sols = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for c, rr in pivots.items():
            vec[c] = -M[rr][fc]
        sols.append({names[i]: vec[i] for i in range(ncols) if vec[i] != 0})
    if verbose:
        print("nullspace dim:", len(sols))
        for s in sols:
            print("  ", {k: str(v) for k, v in s.items()})
    return sols
