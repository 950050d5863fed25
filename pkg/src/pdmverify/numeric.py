"""Floating-point cross-check oracle for the symbolic engine.

The prover decides ``[H, Q] = 0`` by canonical-form reduction.  This
module re-decides it along an independent route: apply the operators to
a random low-degree polynomial EXACTLY (repeated exact application, no
operator composition and no canonical zero test), then evaluate the two
orderings at random numeric points and compare as floats.

Soundness of the point test: an applied expression is a polynomial in
the ring generators (coordinates, radicals, angular transcendentals,
exponentials, parameters, and function-symbol jets).  At a fixed point
the jets F, F', F'' ... are independent quantities, so every generator
except r and rt (which the ring ties to the coordinates) and the
exponential pair (tied to each other by E+ E- = 1) may be assigned an
independent random value; a nonzero polynomial then evaluates to zero
with probability zero.  Residuals are relative, and the verdict keeps a
deliberate gap between the PASS and FAIL thresholds.

This module never calls the symbolic zero test; that is the point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import _poly as P
from . import diffop as DO
from .symexpr import Scalar

__all__ = [
    "NumericVerdict", "eval_point", "point_assignment", "random_point",
    "random_psi", "commutator_residual_numeric", "apply_finite_difference",
]

TOL_PASS = 1e-9
TOL_FAIL = 1e-6


@dataclass(frozen=True)
class NumericVerdict:
    status: str            # "PASS" | "FAIL" | "INCONCLUSIVE"
    max_residual: float
    trials: int
    seed: int


# ---------------------------------------------------------------------------
# points and assignments

def random_point(rng: random.Random) -> tuple:
    """A point with every coordinate magnitude in [1/2, 2], random sign."""
    return tuple(
        rng.choice((-1, 1)) * (0.5 + 1.5 * rng.random()) for _ in range(3)
    )


def point_assignment(point: tuple, rng: random.Random,
                     params: dict | None = None) -> dict:
    """Values for the base generators at ``point``.

    r and rt take their defining values; the transcendentals and the
    exponential pair take independent random values (any consistent
    assignment detects nonzero polynomials, and independence avoids
    accidental coincidences).  Parameter values come from ``params``
    when given, otherwise they are drawn from the same generator.
    Function-symbol and jet values are drawn lazily by eval_point.
    """
    x1, x2, x3 = point
    u = 0.5 + 2.0 * rng.random()
    assign = {
        P.X1: complex(x1), P.X2: complex(x2), P.X3: complex(x3),
        P.R: complex((x1 * x1 + x2 * x2 + x3 * x3) ** 0.5),
        P.RT: complex((x1 * x1 + x2 * x2) ** 0.5),
        P.PHI: complex(rng.uniform(-2.0, 2.0)),
        P.THETA: complex(rng.uniform(-2.0, 2.0)),
        P.LNR: complex(rng.uniform(-2.0, 2.0)),
        P.EPLUS: complex(u), P.EMINUS: complex(1.0 / u),
        P.I: 1j,
        "rng": rng,
    }
    if params:
        for name, value in params.items():
            assign[P.param_key(name)] = complex(value)
    return assign


def _value(assign: dict, vkey: tuple) -> complex:
    got = assign.get(vkey)
    if got is None:
        # parameters, function symbols and jets get lazy seeded values
        if vkey[0] not in ("p", "f", "j"):
            raise KeyError(f"no numeric value for generator {vkey!r}")
        rng = assign["rng"]
        got = complex(rng.choice((-1, 1)) * (0.5 + 1.5 * rng.random()))
        assign[vkey] = got
    return got


def eval_point(s: Scalar, assign: dict) -> complex:
    """Evaluate a Scalar at the assignment produced by point_assignment."""
    def eval_poly(poly: dict) -> complex:
        total = 0j
        for mono, coeff in poly.items():
            term = complex(coeff)
            for vkey, e in mono:
                term *= _value(assign, vkey) ** e
            total += term
        return total

    out = eval_poly(s.num)
    for atom, e in s.den.items():
        out /= eval_poly(P.thaw(atom)) ** e
    return out


def random_psi(rng: random.Random, degree: int = 3) -> Scalar:
    """Random test polynomial in x1, x2, x3 with small integer coefficients.

    Degree 3 suffices: for two second-order operators the commutator has
    order at most three, so every coefficient of the residual operator
    meets a nonzero derivative of psi.  Integer coefficients keep the
    exact application cheap.
    """
    basis = []
    for e1 in range(degree + 1):
        for e2 in range(degree + 1 - e1):
            for e3 in range(degree + 1 - e1 - e2):
                basis.append((e1, e2, e3))
    from . import symexpr as S
    gens = (S.x1, S.x2, S.x3)
    out = Scalar.constant(0)
    for (e1, e2, e3) in basis:
        c = rng.randint(-9, 9)
        if not c:
            continue
        term = Scalar.constant(Fraction(c))
        for g, e in zip(gens, (e1, e2, e3)):
            for _ in range(e):
                term = term * g
        out = out + term
    if out.num:
        return out
    return S.x1 + S.x2 * S.x3  # degenerate draw; any nonzero psi will do


# ---------------------------------------------------------------------------
# the oracle

def _apply(op: dict, psi: Scalar) -> Scalar:
    return DO.apply_op(op, psi)


def commutator_residual_numeric(H: dict, Q: dict, seed: int = 0,
                                trials: int = 3,
                                params: dict | None = None,
                                tol_pass: float = TOL_PASS,
                                tol_fail: float = TOL_FAIL) -> NumericVerdict:
    """Relative residual of H(Q psi) - Q(H psi) at random points.

    Exact symbolic application, floating evaluation; deterministic in
    ``seed``.  The exact application happens once per operator pair;
    each trial then evaluates both orderings at a fresh random point
    with fresh jet values.  PASS below ``tol_pass``, FAIL above
    ``tol_fail``, INCONCLUSIVE in the deliberate gap between them.
    """
    rng = random.Random(seed)
    psi = random_psi(rng)
    hq = _apply(H, _apply(Q, psi))
    qh = _apply(Q, _apply(H, psi))
    worst = 0.0
    for _ in range(max(1, trials)):
        point = random_point(rng)
        assign = point_assignment(point, rng, params)
        e1 = eval_point(hq, assign)
        e2 = eval_point(qh, assign)
        resid = abs(e1 - e2) / (1.0 + abs(e1) + abs(e2))
        worst = max(worst, resid)
    if worst < tol_pass:
        status = "PASS"
    elif worst > tol_fail:
        status = "FAIL"
    else:
        status = "INCONCLUSIVE"
    return NumericVerdict(status=status, max_residual=worst,
                          trials=max(1, trials), seed=seed)


# ---------------------------------------------------------------------------
# finite differences (optional slow cross-check of exact application)

def apply_finite_difference(op: dict, psi: Scalar, point: tuple,
                            assign: dict, h: float = 1e-4) -> complex:
    """(op psi)(point) with the derivatives of psi taken by central
    differences.  psi must be a pure polynomial in the coordinates.
    Checks the derivative bookkeeping of exact application from outside.
    """
    for mono in psi.num:
        for vkey, _ in mono:
            if vkey[0] != "x":
                raise ValueError("finite differences need a pure x-polynomial")
    if psi.den:
        raise ValueError("finite differences need a polynomial psi")

    def psi_at(pt: tuple) -> complex:
        total = 0j
        vals = {P.X1: pt[0], P.X2: pt[1], P.X3: pt[2]}
        for mono, coeff in psi.num.items():
            term = complex(coeff)
            for vkey, e in mono:
                term *= vals[vkey] ** e
            total += term
        return total

    def deriv(alpha: tuple) -> complex:
        # central differences, one axis at a time
        pts = {point: 1.0}
        for axis in range(3):
            for _ in range(alpha[axis]):
                nxt: dict = {}
                for pt, w in pts.items():
                    up = list(pt); up[axis] += h
                    dn = list(pt); dn[axis] -= h
                    nxt[tuple(up)] = nxt.get(tuple(up), 0.0) + w / (2 * h)
                    nxt[tuple(dn)] = nxt.get(tuple(dn), 0.0) - w / (2 * h)
                pts = nxt
        return sum(w * psi_at(pt) for pt, w in pts.items())

    total = 0j
    for alpha, coeff in op.items():
        total += eval_point(coeff, assign) * deriv(alpha)
    return total
