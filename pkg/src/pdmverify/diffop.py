"""Differential operators with exact scalar coefficients.

An operator is a dict mapping derivative multi-indices ``(a1, a2, a3)``
to :class:`~pdmverify.symexpr.Scalar` coefficients (zero coefficients
are never stored), representing ``sum c_alpha(x) d^alpha`` with the
derivatives acting to the right.  Composition is Leibniz's rule::

    (A o B) = sum_{alpha, beta} a_alpha binom(alpha, gamma)
              (d^gamma b_beta) d^(alpha - gamma + beta)

Momentum conventions: ``p_a = -i d_a`` with the symbolic imaginary
unit, and the conformal set is

    P_a = p_a                       L_a = eps_{abc} x_b p_c
    D   = x_n p_n - 3i/2            K_a = r^2 p_a - 2 x_a D

The unitary coordinate inversion ``(U psi)(x) = |x|^-3 psi(x / |x|^2)``
acts on operators by conjugation; :func:`inversion_transform` computes
U A U exactly by pushing the derivatives through the substitution and
re-expanding in the tower (lnr flips sign, the angles are invariant,
radial variables map to their reciprocals over r^2).
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from . import symexpr as S
from .symexpr import Scalar

__all__ = [
    "zero_op", "identity_op", "scalar_op", "partial_op", "op_add", "op_sub",
    "op_neg", "op_scale", "compose", "commutator", "anticommutator",
    "apply_op", "op_order", "op_is_zero", "op_equal", "conformal_generator",
    "conformal_atoms", "hamiltonian", "inversion_transform", "InversionError",
    "op_map", "op_canonical",
]

_ZERO3 = (0, 0, 0)


class InversionError(ValueError):
    """The operator's coefficients leave the tower under inversion."""


def zero_op() -> dict:
    return {}


def identity_op() -> dict:
    return {_ZERO3: Scalar.constant(1)}


def scalar_op(s: Scalar) -> dict:
    if not s.num:
        return {}
    return {_ZERO3: s}


def partial_op(a: int) -> dict:
    idx = [0, 0, 0]
    idx[a - 1] = 1
    return {tuple(idx): Scalar.constant(1)}


def op_canonical(op: dict) -> dict:
    return {k: v for k, v in op.items() if v.num}


def op_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        cur = out.get(k)
        s = v if cur is None else cur + v
        if s.num:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def op_neg(a: dict) -> dict:
    return {k: -v for k, v in a.items()}


def op_sub(a: dict, b: dict) -> dict:
    return op_add(a, op_neg(b))


def op_scale(a: dict, c) -> dict:
    if isinstance(c, (int, Fraction)):
        c = Scalar.constant(c)
    if not c.num:
        return {}
    return {k: c * v for k, v in a.items()}


class _DerivPyramid:
    """Lazy mixed partials of one scalar, shared across Leibniz terms."""

    __slots__ = ("cache",)

    def __init__(self, base: Scalar):
        self.cache = {_ZERO3: base}

    def get(self, gamma: tuple) -> Scalar:
        got = self.cache.get(gamma)
        if got is None:
            for axis in (1, 2, 3):
                if gamma[axis - 1]:
                    prev = list(gamma)
                    prev[axis - 1] -= 1
                    got = self.get(tuple(prev)).diff(axis)
                    break
            self.cache[gamma] = got
        return got


def _multi_binom(alpha: tuple, gamma: tuple) -> int:
    return comb(alpha[0], gamma[0]) * comb(alpha[1], gamma[1]) * comb(alpha[2], gamma[2])


def _submulti(alpha: tuple):
    for g1 in range(alpha[0] + 1):
        for g2 in range(alpha[1] + 1):
            for g3 in range(alpha[2] + 1):
                yield (g1, g2, g3)


def compose(a: dict, b: dict) -> dict:
    """Operator product A o B."""
    out: dict = {}
    pyramids = {beta: _DerivPyramid(coeff) for beta, coeff in b.items()}
    for alpha, ca in a.items():
        for beta, cb in b.items():
            pyr = pyramids[beta]
            for gamma in _submulti(alpha):
                dcb = pyr.get(gamma)
                if not dcb.num:
                    continue
                m = _multi_binom(alpha, gamma)
                target = (alpha[0] - gamma[0] + beta[0],
                          alpha[1] - gamma[1] + beta[1],
                          alpha[2] - gamma[2] + beta[2])
                term = ca * dcb
                if m != 1:
                    term = Fraction(m) * term
                cur = out.get(target)
                s = term if cur is None else cur + term
                if s.num:
                    out[target] = s
                else:
                    out.pop(target, None)
    return out


def commutator(a: dict, b: dict) -> dict:
    return op_sub(compose(a, b), compose(b, a))


def anticommutator(a: dict, b: dict) -> dict:
    return op_add(compose(a, b), compose(b, a))


def apply_op(op: dict, psi: Scalar) -> Scalar:
    pyr = _DerivPyramid(psi)
    out = Scalar.constant(0)
    for alpha, c in op.items():
        out = out + c * pyr.get(alpha)
    return out


def op_order(op: dict) -> int:
    return max((sum(k) for k in op), default=0)


def op_is_zero(op: dict, constraints: S.Constraints | None = None) -> bool:
    return all(v.is_zero(constraints) for v in op.values())


def op_equal(a: dict, b: dict, constraints: S.Constraints | None = None) -> bool:
    return op_is_zero(op_sub(a, b), constraints)


def op_map(op: dict, fn) -> dict:
    out = {}
    for k, v in op.items():
        w = fn(v)
        if w.num:
            out[k] = w
    return out


# ---------------------------------------------------------------------------
# conformal generators

def _mi(v: Scalar) -> Scalar:
    return S.iunit * v


_E1, _E2, _E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
_EPS = {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
        (2, 1, 3): -1, (3, 2, 1): -1, (1, 3, 2): -1}


def conformal_generator(name: str) -> dict:
    """One of P1..P3, K1..K3, L1..L3, D (fresh dict each call)."""
    xs = {1: S.x1, 2: S.x2, 3: S.x3}
    es = {1: _E1, 2: _E2, 3: _E3}
    mi = -S.iunit
    if name.startswith("P") and name[1:] in "123":
        a = int(name[1])
        return {es[a]: mi}
    if name.startswith("L") and name[1:] in "123":
        a = int(name[1])
        out: dict = {}
        for (i, j, k), sgn in _EPS.items():
            if i == a:
                out = op_add(out, {es[k]: Fraction(sgn) * mi * xs[j]})
        return out
    if name == "D":
        out = {es[a]: mi * xs[a] for a in (1, 2, 3)}
        out[_ZERO3] = Scalar.constant(Fraction(-3, 2)) * S.iunit
        return out
    if name.startswith("K") and name[1:] in "123":
        a = int(name[1])
        r2 = S.x1 * S.x1 + S.x2 * S.x2 + S.x3 * S.x3
        out = {}
        for b in (1, 2, 3):
            c = 2 * S.iunit * xs[a] * xs[b]
            if a == b:
                c = c + mi * r2
            out[es[b]] = c
        out[_ZERO3] = 3 * S.iunit * xs[a]
        return out
    raise KeyError(f"unknown conformal generator {name!r}")


def conformal_atoms() -> dict:
    return {n: conformal_generator(n)
            for n in ("P1", "P2", "P3", "K1", "K2", "K3",
                      "L1", "L2", "L3", "D")}


# ---------------------------------------------------------------------------
# Hamiltonians

def hamiltonian(f: Scalar, V: Scalar) -> dict:
    """H = p_a f p_a + V = -f Laplacian - (grad f) . grad + V."""
    out = {(2, 0, 0): -f, (0, 2, 0): -f, (0, 0, 2): -f}
    for a, e in ((1, _E1), (2, _E2), (3, _E3)):
        df = f.diff(a)
        if df.num:
            out[e] = -df
    if V.num:
        out[_ZERO3] = V
    return op_canonical(out)


def ordering_shift(f: Scalar) -> Scalar:
    """Scalar by which the symmetric ordering sqrt(f) p^2 sqrt(f) differs
    from p_a f p_a:  sqrt(f) p^2 sqrt(f) = p_a f p_a - ordering_shift(f),
    with ordering_shift(f) = Lap(f)/2 - |grad f|^2 / (4 f)."""
    lap = Scalar.constant(0)
    grad2 = Scalar.constant(0)
    for a in (1, 2, 3):
        df = f.diff(a)
        lap = lap + df.diff(a)
        grad2 = grad2 + df * df
    return Fraction(1, 2) * lap - grad2 / (Fraction(4) * f)


# ---------------------------------------------------------------------------
# inversion

_SUMX2_S = S.x1 * S.x1 + S.x2 * S.x2 + S.x3 * S.x3
_WEIGHT = S.r / (_SUMX2_S * _SUMX2_S)  # r^-3 written radical-free downstairs

_INV_IMAGES = {
    S.GENERATOR_NAMES["x1"]: S.x1 / _SUMX2_S,
    S.GENERATOR_NAMES["x2"]: S.x2 / _SUMX2_S,
    S.GENERATOR_NAMES["x3"]: S.x3 / _SUMX2_S,
    S.GENERATOR_NAMES["r"]: S.r / _SUMX2_S,
    S.GENERATOR_NAMES["rt"]: S.rt / _SUMX2_S,
    S.GENERATOR_NAMES["lnr"]: -S.lnr,
}


def _inversion_substitute(c: Scalar) -> Scalar:
    for v in c.free_vars():
        kind = v[0]
        if kind == "j":
            raise InversionError(
                "abstract three-variable jets cannot be inverted")
        if kind == "f" and v[2] not in ("phi", "theta"):
            raise InversionError(
                f"function symbol of non-invariant argument {v[2]!r} "
                "cannot be inverted")
    return c.substitute(_INV_IMAGES)


def _jacobian() -> dict:
    """J[a][b] = d sigma_b / d y_a for sigma(y) = y / |y|^2."""
    xs = {1: S.x1, 2: S.x2, 3: S.x3}
    J: dict = {}
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            term = -2 * xs[a] * xs[b] / (_SUMX2_S * _SUMX2_S)
            if a == b:
                term = term + 1 / _SUMX2_S
            J[(a, b)] = term
    return J


def inversion_transform(op: dict) -> dict:
    """Conjugate an operator by the inversion unitary: returns U A U.

    Strategy: carry ``A`` through ``A[w(y) psi(sigma(y))]`` keeping the
    composite state as ``sum_beta c_beta(y) (d^beta psi)(sigma(y))``,
    substitute ``y -> sigma(x)`` in all coefficients and multiply by the
    outer weight ``w(x) = r^-3``.
    """
    J = _jacobian()
    # states[beta] = coefficient of (d^beta psi)(sigma): start from w(y) psi
    base: dict = {_ZERO3: _WEIGHT}
    state_cache: dict = {_ZERO3: base}

    def derive_state(state: dict, a: int) -> dict:
        out: dict = {}

        def acc(beta, val):
            cur = out.get(beta)
            s = val if cur is None else cur + val
            if s.num:
                out[beta] = s
            else:
                out.pop(beta, None)

        for beta, c in state.items():
            dc = c.diff(a)
            if dc.num:
                acc(beta, dc)
            for b in (1, 2, 3):
                nb = list(beta)
                nb[b - 1] += 1
                acc(tuple(nb), c * J[(a, b)])
        return out

    def state_for(alpha: tuple) -> dict:
        got = state_cache.get(alpha)
        if got is None:
            for axis in (1, 2, 3):
                if alpha[axis - 1]:
                    prev = list(alpha)
                    prev[axis - 1] -= 1
                    got = derive_state(state_for(tuple(prev)), axis)
                    break
            state_cache[alpha] = got
        return got

    merged: dict = {}
    for alpha, ca in op.items():
        for beta, c in state_for(alpha).items():
            term = ca * c
            cur = merged.get(beta)
            s = term if cur is None else cur + term
            if s.num:
                merged[beta] = s
            else:
                merged.pop(beta, None)
    out: dict = {}
    for beta, c in merged.items():
        # evaluate at y = sigma(x) (sigma is an involution, so the psi
        # derivatives land back at x) and apply the outer weight w(x)
        c2 = _WEIGHT * _inversion_substitute(c)
        if c2.num:
            out[beta] = c2
    return out
