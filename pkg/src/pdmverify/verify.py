"""Verification engine: prove or refute the catalog's commutation claims.

The central operation takes a catalog entry, builds its Hamiltonian and
claimed integrals, reduces every commutator [H, Q] to canonical form,
and reports PASS (identically zero) or FAIL with a minimal residual
witness.  A floating-point oracle (module ``numeric``) re-decides every
integral along an independent route, and the report records whether the
two verdicts agree.

Beyond entry verification this module holds the second-layer analyses:

* ``algebra_table``     -- expand [Q_i, Q_j] over the span of products
                           of integrals with first-order symmetries;
* ``check_relation``    -- prove one printed commutation relation exactly;
* ``inversion_pairing`` -- match integrals with their conjugates under
                           the coordinate inversion x -> x / x^2;
* ``resolve_n_epsilon`` -- decide which definition of the undocumented
                           first-order tokens N1..N3 makes the rotation
                           families verify, by a seeded numeric screen of
                           every candidate followed by symbolic
                           confirmation of the survivors;
* ``repair_trace_term`` -- for an entry whose failure sits in the
                           third-order residual, attempt the documented
                           trace-term correction and report the outcome;
* ``determining_consistency`` -- cross-check passing integrals against
                           the determining-equation residuals.

Witness convention: the reported witness is the smallest nonzero
canonical term of [H, Q], smallest meaning first by total derivative
order, then by derivative multi-index, then by the monomial order of the
coefficient's numerator.  Lower-order terms make better diagnostics
(they point at the scalar/potential level where typos live), and the
canonical form makes the choice deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from . import _poly as P
from . import symexpr as S
from . import diffop as DO
from . import grammar as G
from . import linsolve as LS
from . import numeric as NUM
from . import detsys as DT
from .catalog import (
    CatalogEntry, BuiltEntry, CatalogError, build_entry, load_catalog,
    n_epsilon_candidates,
)

__all__ = [
    "NotInSpan", "IntegralResult", "VerificationReport", "AlgebraRelation",
    "InversionMatch", "NResolution", "RepairOutcome", "DeterminingRecord",
    "N_RESOLUTIONS", "KAPPA_SAMPLES",
    "residual_witness", "verify_entry", "param_grid", "verify_catalog",
    "expand_in_span", "algebra_table", "check_relation", "inversion_pairing",
    "resolve_n_epsilon", "repair_trace_term", "determining_consistency",
]


class NotInSpan(Exception):
    """A commutator could not be expressed over the requested span."""


# Engine-derived resolutions of the undocumented N tokens, keyed by entry
# and by the sign bound to the epsilon parameter: N_a = alpha P_a +
# (beta * epsilon) K_a.  ``resolve_n_epsilon`` re-derives these from
# scratch; this table lets routine verification skip the search.
N_RESOLUTIONS: dict = {
    "ROT.03": {1: (Fraction(-1), Fraction(-1)), -1: (Fraction(-1), Fraction(1))},
    "ROT.04": {1: (Fraction(-1), Fraction(1)), -1: (Fraction(-1), Fraction(1))},
    "ROT.09": {1: (Fraction(1), Fraction(1)), -1: (Fraction(1), Fraction(1))},
}

# Entries whose mass carries a free deformation parameter that makes the
# fully symbolic reduction intractable at desk scale are verified at
# sampled rational values instead; the report records the sample.
KAPPA_SAMPLES = (Fraction(2), Fraction(3))


# ---------------------------------------------------------------------------
# witnesses


def _mi_string(mi: tuple) -> str:
    if not any(mi):
        return "1"
    parts = []
    for axis, e in enumerate(mi, start=1):
        if e == 1:
            parts.append(f"d{axis}")
        elif e > 1:
            parts.append(f"d{axis}^{e}")
    return "*".join(parts)


def residual_witness(C: dict, constraints=None) -> str | None:
    """Smallest nonzero canonical term of the operator C, or None if C
    is zero.  See the module docstring for the order of smallness."""
    for mi in sorted(C, key=lambda m: (sum(m), m)):
        sc = C[mi]
        num = constraints.reduce_poly(sc.num) if constraints else sc.num
        if not num:
            continue
        mono = min(num, key=P.mono_sort)
        piece = S.Scalar({mono: num[mono]}, dict(sc.den))
        return f"({G.scalar_to_string(piece)}) * {_mi_string(mi)}"
    return None


def _witness_order(C: dict, constraints=None) -> int | None:
    """Total derivative order of the first (smallest) nonzero residual."""
    orders = []
    for mi, sc in C.items():
        num = constraints.reduce_poly(sc.num) if constraints else sc.num
        if num:
            orders.append(sum(mi))
    return min(orders) if orders else None


# ---------------------------------------------------------------------------
# entry verification


@dataclass(frozen=True)
class IntegralResult:
    index: int               # 1-based position in the entry's integral list
    symbolic: str            # "PASS" | "FAIL"
    witness: str | None      # minimal residual term on FAIL
    numeric: str             # "PASS" | "FAIL" | "INCONCLUSIVE" | "SKIPPED"
    numeric_residual: float | None


@dataclass(frozen=True)
class VerificationReport:
    entry_id: str
    expected: str            # catalog expectation: "PASS" | "SUSPECT"
    ordering: str
    params: dict             # instantiated parameter values (epsilon, kappa)
    n_def: tuple | None      # (alpha, beta) used for N tokens, if any
    integrals: tuple         # of IntegralResult
    first_order: tuple       # of (name, "PASS"/"FAIL")
    agreement: bool          # numeric verdicts match symbolic where decisive
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(r.symbolic == "PASS" for r in self.integrals) and all(
            st == "PASS" for _, st in self.first_order
        )

    def to_record(self) -> dict:
        return {
            "entry": self.entry_id,
            "expected": self.expected,
            "ordering": self.ordering,
            "params": {k: str(v) for k, v in self.params.items()},
            "n_def": [str(v) for v in self.n_def] if self.n_def else None,
            "integrals": [
                {
                    "index": r.index,
                    "symbolic": r.symbolic,
                    "witness": r.witness,
                    "numeric": r.numeric,
                    "residual": r.numeric_residual,
                }
                for r in self.integrals
            ],
            "first_order": [[n, s] for n, s in self.first_order],
            "agreement": self.agreement,
            "passed": self.passed,
            "elapsed": round(self.elapsed, 3),
        }


def _stored_n_def(entry: CatalogEntry, param_values: dict | None):
    table = N_RESOLUTIONS.get(entry.entry_id)
    if table is None:
        raise CatalogError(
            f"entry {entry.entry_id} uses N tokens but has no stored "
            "resolution; run resolve_n_epsilon or pass n_def explicitly"
        )
    eps = (param_values or {}).get("epsilon")
    if eps is None or int(eps) not in table:
        raise CatalogError(
            f"entry {entry.entry_id}: N resolution is bound per epsilon; "
            "pass param_values with epsilon = +1 or -1"
        )
    return table[int(eps)]


def verify_entry(entry: CatalogEntry, n_def=None, param_values: dict | None = None,
                 seed: int = 0, trials: int = 2,
                 run_numeric: bool = True) -> VerificationReport:
    """Build one catalog entry and decide every commutation claim.

    ``param_values`` instantiates declared parameters (epsilon must be
    given as +1/-1 for entries that enumerate it); remaining parameters
    stay symbolic.  ``n_def`` overrides the stored N-token resolution.
    """
    t0 = time.perf_counter()
    if entry.uses_n_token and n_def is None:
        n_def = _stored_n_def(entry, param_values)
    built = build_entry(entry, n_def=n_def, param_values=param_values)
    cons = built.constraints
    numeric_params = {k: v for k, v in (param_values or {}).items()}

    results = []
    agreement = True
    for idx, q in enumerate(built.integrals, start=1):
        C = DO.commutator(built.hamiltonian, q)
        ok = DO.op_is_zero(C, cons)
        witness = None if ok else residual_witness(C, cons)
        n_status, n_resid = "SKIPPED", None
        if run_numeric:
            v = NUM.commutator_residual_numeric(
                built.hamiltonian, q, seed=seed + idx, trials=trials,
                params=numeric_params,
            )
            n_status, n_resid = v.status, v.max_residual
            if n_status in ("PASS", "FAIL") and (n_status == "PASS") != ok:
                agreement = False
        results.append(IntegralResult(
            index=idx, symbolic="PASS" if ok else "FAIL", witness=witness,
            numeric=n_status, numeric_residual=n_resid,
        ))

    firsts = tuple(
        (name, "PASS" if DO.op_is_zero(DO.commutator(built.hamiltonian, op), cons)
         else "FAIL")
        for name, op in built.first_order
    )
    return VerificationReport(
        entry_id=entry.entry_id,
        expected=entry.expected,
        ordering=entry.ordering,
        params=dict(param_values or {}),
        n_def=tuple(n_def) if n_def else None,
        integrals=tuple(results),
        first_order=firsts,
        agreement=agreement,
        elapsed=time.perf_counter() - t0,
    )


def param_grid(entry: CatalogEntry) -> list:
    """Parameter instantiations an entry is verified under: epsilon is
    enumerated over both signs, the mass-deformation parameter kappa is
    sampled (symbolic reduction is out of desk-scale reach), everything
    else stays symbolic."""
    grids = [None]
    if "epsilon" in entry.params:
        grids = [{"epsilon": Fraction(1)}, {"epsilon": Fraction(-1)}]
    if "kappa" in entry.params:
        out = []
        for base in grids:
            for kv in KAPPA_SAMPLES:
                cur = dict(base or {})
                cur["kappa"] = kv
                out.append(cur)
        grids = out
    return grids


def verify_catalog(entries=None, ids=None, seed: int = 0, trials: int = 2,
                   run_numeric: bool = True, progress=None) -> list:
    """Verify every entry (or the ``ids`` subset) under its parameter
    grid; returns reports ordered by catalog position, then grid order."""
    if entries is None:
        entries = load_catalog()
    if ids is not None:
        wanted = set(ids)
        entries = [e for e in entries if e.entry_id in wanted]
    reports = []
    for e in entries:
        for pv in param_grid(e):
            rep = verify_entry(e, param_values=pv, seed=seed, trials=trials,
                               run_numeric=run_numeric)
            reports.append(rep)
            if progress is not None:
                progress(rep)
    return reports


# ---------------------------------------------------------------------------
# span expansion and commutator algebra


def _gaussian_const(sc: S.Scalar):
    """Fraction pair (re, im) if the scalar is a Gaussian rational, else None."""
    if sc.den:
        return None
    re = Fraction(0)
    im = Fraction(0)
    for mono, c in sc.num.items():
        if mono == ():
            re = c
        elif mono == ((P.I, 1),):
            im = c
        else:
            return None
    return (re, im)


def expand_in_span(target: dict, basis: dict, constraints=None) -> dict:
    """Exact coefficients expressing ``target`` as a rational combination
    of the ``basis`` operators; raises NotInSpan when impossible.  The
    basis may include imaginary-unit multiples to reach Gaussian-rational
    coefficients."""
    names = sorted(basis)
    E = DO.op_neg(target)
    for name in names:
        E = DO.op_add(E, DO.op_scale(basis[name], LS.placeholder(name)))
    rows = LS.operator_rows(E, names, constraints=constraints)
    sol = LS.particular_solution(rows, names)
    if sol is None:
        raise NotInSpan(f"target is not a combination of {names}")
    # substitute back and prove the remainder is identically zero
    images = {S.param_key(LS.PLACEHOLDER_PREFIX + n): S.Scalar.constant(c)
              for n, c in sol.items()}
    R = DO.op_map(E, lambda sc: sc.substitute(images))
    if not DO.op_is_zero(R, constraints):
        raise NotInSpan("solver produced a non-vanishing remainder")
    return {n: c for n, c in sol.items() if c}


@dataclass(frozen=True)
class AlgebraRelation:
    i: int                   # 1-based integral indices
    j: int
    zero: bool               # [Q_i, Q_j] == 0
    expansion: dict | None   # {basis name: Fraction} when expressible
    in_span: bool

    def to_record(self) -> dict:
        return {
            "i": self.i, "j": self.j, "zero": self.zero,
            "in_span": self.in_span,
            "expansion": {k: str(v) for k, v in self.expansion.items()}
            if self.expansion is not None else None,
        }


def algebra_table(built: BuiltEntry) -> list:
    """Commutators of every integral pair, expanded over the span of
    {Q_k composed with a first-order symmetry} + {Q_k} + {first-order
    symmetries} + {H} + {identity}, each with its imaginary-unit multiple.
    Inexpressible pairs are recorded with in_span=False, not raised."""
    qs = list(built.integrals)
    cons = built.constraints
    basis: dict = {}
    iu = S.iunit
    for k, qk in enumerate(qs, start=1):
        basis[f"Q{k}"] = qk
        basis[f"i*Q{k}"] = DO.op_scale(qk, iu)
        for name, gop in built.first_order:
            comp = DO.compose(qk, gop)
            basis[f"Q{k}*{name}"] = comp
            basis[f"i*Q{k}*{name}"] = DO.op_scale(comp, iu)
    for name, gop in built.first_order:
        basis[name] = gop
        basis[f"i*{name}"] = DO.op_scale(gop, iu)
    basis["H"] = built.hamiltonian
    basis["i*H"] = DO.op_scale(built.hamiltonian, iu)
    basis["1"] = DO.identity_op()
    basis["i"] = DO.op_scale(DO.identity_op(), iu)

    out = []
    for a in range(len(qs)):
        for b in range(a + 1, len(qs)):
            C = DO.commutator(qs[a], qs[b])
            if DO.op_is_zero(C, cons):
                out.append(AlgebraRelation(a + 1, b + 1, True, {}, True))
                continue
            try:
                exp = expand_in_span(C, basis, constraints=cons)
                out.append(AlgebraRelation(a + 1, b + 1, False, exp, True))
            except NotInSpan:
                out.append(AlgebraRelation(a + 1, b + 1, False, None, False))
    return out


def check_relation(lhs: tuple, rhs: dict, constraints=None) -> bool:
    """Prove [lhs[0], lhs[1]] == rhs exactly."""
    A, B = lhs
    return DO.op_equal(DO.commutator(A, B), rhs, constraints)


# ---------------------------------------------------------------------------
# inversion pairing


@dataclass(frozen=True)
class InversionMatch:
    index: int               # 1-based integral index
    matched: int | None      # index of the integral its conjugate equals
    scale: str | None        # proportionality factor as grammar text
    note: str

    def to_record(self) -> dict:
        return {"index": self.index, "matched": self.matched,
                "scale": self.scale, "note": self.note}


def _proportionality(T: dict, Q: dict, constraints=None):
    """Scalar lam with T == lam * Q, or None.  lam must be a constant of
    the coefficient field (Gaussian rational)."""
    for key in sorted(Q):
        cq = Q[key]
        if cq.is_zero(constraints):
            continue
        ct = T.get(key)
        if ct is None:
            return None
        lam = ct * cq.inverse()
        if _gaussian_const(lam) is None:
            return None
        if DO.op_equal(T, DO.op_scale(Q, lam), constraints):
            return lam
        return None
    return None


def inversion_pairing(built: BuiltEntry) -> list:
    """Conjugate every integral by the inversion x -> x/x^2 and identify
    which integral of the same entry (if any) the conjugate is a constant
    multiple of."""
    out = []
    cons = built.constraints
    for idx, q in enumerate(built.integrals, start=1):
        try:
            T = DO.inversion_transform(q)
        except DO.InversionError as err:
            out.append(InversionMatch(idx, None, None,
                                      f"conjugate leaves the tower: {err}"))
            continue
        found = False
        for jdx, q2 in enumerate(built.integrals, start=1):
            lam = _proportionality(T, q2, cons)
            if lam is not None:
                out.append(InversionMatch(
                    idx, jdx, G.scalar_to_string(lam),
                    "self-conjugate" if jdx == idx else "paired"))
                found = True
                break
        if not found:
            out.append(InversionMatch(idx, None, None, "no match in entry"))
    return out


# ---------------------------------------------------------------------------
# N-token resolution


@dataclass(frozen=True)
class NResolution:
    seed: int
    trials: int
    rows: tuple              # entry ids examined
    kappa: Fraction | None   # sample used for kappa-bearing rows
    candidates: tuple        # (alpha, beta) pairs
    matrix: dict             # (alpha, beta, entry_id, eps) -> status
    winners: tuple           # candidates passing every cell, confirmed
    per_cell_winners: dict   # (entry_id, eps) -> tuple of candidates

    def to_record(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "rows": list(self.rows),
            "kappa": str(self.kappa) if self.kappa is not None else None,
            "winners": [[str(a), str(b)] for a, b in self.winners],
            "per_cell_winners": {
                f"{eid}@eps={eps}": [[str(a), str(b)] for a, b in cands]
                for (eid, eps), cands in sorted(self.per_cell_winners.items())
            },
            "matrix": {
                f"N=({a},{b})|{eid}|eps={eps}": st
                for (a, b, eid, eps), st in sorted(
                    self.matrix.items(), key=lambda kv: repr(kv[0]))
            },
        }


def _solve_complex(M: list, rhs: list) -> list:
    """Dense complex Gaussian elimination (partial pivoting)."""
    n = len(M)
    A = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(A[r][c]))
        if abs(A[piv][c]) < 1e-12:
            raise ArithmeticError("singular sample matrix")
        A[c], A[piv] = A[piv], A[c]
        A[c] = [v / A[c][c] for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [v - f * w for v, w in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def _fit_quadratic(samples: list) -> list:
    """Coefficients (c00, c10, c01, c20, c11, c02) of a quadratic in
    (alpha, beta) through six sampled values."""
    M = []
    rhs = []
    for (a, b), v in samples:
        M.append([1.0, a, b, a * a, a * b, b * b])
        rhs.append(v)
    return _solve_complex(M, rhs)


_N_SAMPLE_DEFS = (
    (Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)), (Fraction(1), Fraction(1)),
    (Fraction(2), Fraction(0)), (Fraction(0), Fraction(2)),
)


def resolve_n_epsilon(entries=None, seed: int = 0, trials: int = 1,
                      kappa: Fraction = KAPPA_SAMPLES[0],
                      confirm_symbolic: bool = True,
                      tol_pass: float = NUM.TOL_PASS,
                      tol_fail: float = NUM.TOL_FAIL) -> NResolution:
    """Decide the definition of the N tokens: N_a = alpha P_a + beta
    epsilon K_a over the deterministic candidate grid.

    The commutator residual at a fixed test state and point is an exact
    quadratic polynomial in (alpha, beta), so six sampled definitions
    determine the residual of all candidates; the full status matrix is
    then read off and any total survivor is confirmed symbolically.
    Deterministic in ``seed`` by construction, and stable across seeds
    because statuses sit far from the thresholds on both sides.
    """
    if entries is None:
        entries = [e for e in load_catalog() if e.uses_n_token]
    cands = n_epsilon_candidates()
    matrix: dict = {}
    per_cell: dict = {}

    for e in entries:
        eps_values = (Fraction(1), Fraction(-1)) if "epsilon" in e.params else (None,)
        for eps in eps_values:
            pv: dict = {}
            if eps is not None:
                pv["epsilon"] = eps
            if "kappa" in e.params:
                pv["kappa"] = kappa
            # exact residual evaluations at the six sample definitions
            fits = None  # per (integral, trial) quadratic coefficients
            n_int = None
            per_sample = []
            for nd in _N_SAMPLE_DEFS:
                built = build_entry(e, n_def=nd, param_values=pv)
                n_int = len(built.integrals)
                vals = []
                for idx, q in enumerate(built.integrals, start=1):
                    import random as _random
                    rng = _random.Random(seed * 7919 + idx)
                    psi = NUM.random_psi(rng)
                    hq = DO.apply_op(built.hamiltonian, DO.apply_op(q, psi))
                    qh = DO.apply_op(q, DO.apply_op(built.hamiltonian, psi))
                    per_trial = []
                    for _ in range(max(1, trials)):
                        point = NUM.random_point(rng)
                        assign = NUM.point_assignment(point, rng, pv)
                        per_trial.append(NUM.eval_point(hq, assign)
                                         - NUM.eval_point(qh, assign))
                    vals.append(per_trial)
                per_sample.append((nd, vals))
            # fit one quadratic per (integral, trial)
            fits = []
            for idx in range(n_int):
                for t in range(max(1, trials)):
                    pts = [((float(nd[0]), float(nd[1])), vals[idx][t])
                           for nd, vals in per_sample]
                    fits.append(_fit_quadratic(pts))
            cell_winners = []
            for (a, b) in cands:
                fa, fb = float(a), float(b)
                worst = 0.0
                for cf in fits:
                    v = (cf[0] + cf[1] * fa + cf[2] * fb + cf[3] * fa * fa
                         + cf[4] * fa * fb + cf[5] * fb * fb)
                    worst = max(worst, abs(v))
                if worst < tol_pass * 10:
                    status = "PASS"
                elif worst > tol_fail:
                    status = "FAIL"
                else:
                    status = "INCONCLUSIVE"
                matrix[(a, b, e.entry_id, eps)] = status
                if status == "PASS":
                    cell_winners.append((a, b))
            per_cell[(e.entry_id, eps)] = tuple(cell_winners)

    # total winners: PASS in every cell, then symbolic confirmation
    winners = []
    cells = sorted(per_cell)
    for cand in cands:
        if all(cand in per_cell[c] for c in cells):
            winners.append(cand)
    if confirm_symbolic:
        confirmed = []
        for cand in winners:
            good = True
            for e in entries:
                eps_values = (Fraction(1), Fraction(-1)) \
                    if "epsilon" in e.params else (None,)
                for eps in eps_values:
                    pv = {}
                    if eps is not None:
                        pv["epsilon"] = eps
                    if "kappa" in e.params:
                        pv["kappa"] = kappa
                    built = build_entry(e, n_def=cand, param_values=pv)
                    for q in built.integrals:
                        if not DO.op_is_zero(
                                DO.commutator(built.hamiltonian, q),
                                built.constraints):
                            good = False
                            break
                    if not good:
                        break
                if not good:
                    break
            if good:
                confirmed.append(cand)
        winners = confirmed

    return NResolution(
        seed=seed, trials=max(1, trials),
        rows=tuple(e.entry_id for e in entries),
        kappa=kappa if any("kappa" in e.params for e in entries) else None,
        candidates=tuple(cands), matrix=matrix, winners=tuple(winners),
        per_cell_winners=per_cell,
    )


# ---------------------------------------------------------------------------
# trace-term repair


@dataclass(frozen=True)
class RepairOutcome:
    entry_id: str
    status: str              # "not-applicable" | "repaired" | "irreparable"
    detail: str
    c_value: Fraction | None # solved trace coefficient, when repaired
    corrected_witness: str | None

    def to_record(self) -> dict:
        return {"entry": self.entry_id, "status": self.status,
                "detail": self.detail,
                "c": str(self.c_value) if self.c_value is not None else None,
                "corrected_witness": self.corrected_witness}


def repair_trace_term(entry: CatalogEntry, param_values: dict | None = None,
                      n_def=None) -> RepairOutcome:
    """Attempt the trace-term repair of a failing integral.

    The third-order residual of [H, Q] for a second-order Q vanishes only
    when the second-order coefficient is conformally compatible with the
    mass; adding a pure-trace piece G(x) delta_ab (with its divergence
    first-order part) leaves exactly a one-parameter family G = c*f - 1
    once the third-order condition is imposed.  This routine adjoins that
    family with an unknown rational c, solves the remaining linear system
    for c, and reports the outcome.  An entry that already passes is a
    no-op; failures that are invisible at third order are reported as
    they are found."""
    if entry.uses_n_token and n_def is None:
        n_def = _stored_n_def(entry, param_values)
    built = build_entry(entry, n_def=n_def, param_values=param_values)
    cons = built.constraints
    failing = None
    order = None
    for q in built.integrals:
        C = DO.commutator(built.hamiltonian, q)
        if not DO.op_is_zero(C, cons):
            failing = q
            order = _witness_order(C, cons)
            break
    if failing is None:
        return RepairOutcome(entry.entry_id, "not-applicable",
                             "every integral already passes", None, None)

    # trace correction with G = c*f - 1: second-order part G delta_ab,
    # first-order part dG/dx_a (the divergence choice)
    f = built.mass
    c = LS.placeholder("trace")
    Gfun = c * f - S.Scalar.constant(1)
    mu = tuple(tuple(Gfun if a == b else S.Scalar.constant(0)
                     for b in range(3)) for a in range(3))
    correction = DT.q_operator(mu)
    R = DO.commutator(built.hamiltonian, DO.op_add(failing, correction))
    rows = LS.operator_rows(R, ["trace"], constraints=cons)
    sol = LS.particular_solution(rows, ["trace"])
    if sol is None:
        note = ("no rational c makes Q + (c*f - 1)-trace correction commute; "
                f"original failure at derivative order {order}")
        return RepairOutcome(entry.entry_id, "irreparable", note, None, None)
    cval = sol["trace"]
    images = {S.param_key(LS.PLACEHOLDER_PREFIX + "trace"):
              S.Scalar.constant(cval)}
    R2 = DO.op_map(R, lambda sc: sc.substitute(images))
    if DO.op_is_zero(R2, cons):
        return RepairOutcome(
            entry.entry_id, "repaired",
            f"Q + trace correction with G = c*f - 1 commutes at c = {cval}",
            cval, None)
    return RepairOutcome(
        entry.entry_id, "irreparable",
        "solved c leaves a residual (system inconsistent beyond the "
        f"solved rows); original failure at derivative order {order}",
        cval, residual_witness(R2, cons))


# ---------------------------------------------------------------------------
# determining-system cross-check


@dataclass(frozen=True)
class DeterminingRecord:
    index: int
    div_xi: bool             # first-order coefficient equals div(mu)
    residuals_zero: bool

    def to_record(self) -> dict:
        return {"index": self.index, "div_xi": self.div_xi,
                "residuals_zero": self.residuals_zero}


_DET_SKIP = ("r4_printed[", "r6_full_printed[", "r6_reduced[", "r_de1[")


def determining_consistency(built: BuiltEntry) -> list:
    """For each second-order integral of a (passing) entry, split it into
    (mu, xi, eta) and prove the determining-system residuals vanish, with
    the entry's effective potential (ordering shift included).  Also
    records whether xi is exactly the divergence of mu."""
    cons = built.constraints
    V_eff = built.hamiltonian.get((0, 0, 0), S.Scalar.constant(0))
    out = []
    for idx, q in enumerate(built.integrals, start=1):
        if DO.op_order(q) != 2:
            continue
        mu, xi, eta = DT.operator_coefficients(q)
        div = DT._div({(a, b): mu[a - 1][b - 1]
                       for a in (1, 2, 3) for b in (1, 2, 3)})
        div_ok = all((xi[a] - div[a]).is_zero(cons) for a in range(3))
        res = DT.determining_residuals(built.mass, V_eff, mu, xi=xi, eta=eta)
        out.append(DeterminingRecord(
            index=idx, div_xi=div_ok,
            residuals_zero=res.all_zero(cons, skip=_DET_SKIP)))
    return out
