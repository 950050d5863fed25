"""Exact scalar expressions: fractions over the coordinate ring, with calculus.

A :class:`Scalar` is a quotient ``numerator / prod(atom^k)`` where the
numerator is a canonical polynomial (see :mod:`pdmverify._poly`) and the
denominator is kept factored into interned *atoms*: primitive,
sign-normalized polynomials that are free of the imaginary unit and of
both radicals (denominators are rationalized on construction) and carry
no invertible content (their E-exponential content is stripped into the
numerator).  Equality of scalars is decided by subtracting and testing
the numerator dict for emptiness — the ring is a domain, so this is a
complete decision procedure, optionally modulo declared parameter
constraints such as ``epsilon^2 = 1``.

Partial derivatives implement the chain rules of the fixed generator
tower::

    d r   = x_a r / (x1^2+x2^2+x3^2)          d lnr  = x_a / (x1^2+x2^2+x3^2)
    d rt  = x_a rt / (x1^2+x2^2)  (a = 1,2)   d E+-  = +- E+- * d phi
    d phi = (-x2, x1, 0) / (x1^2+x2^2)
    d theta = (x1 x3 rt, x2 x3 rt, -rt (x1^2+x2^2)) / ((x1^2+x2^2+x3^2)(x1^2+x2^2))

with the convention cos(theta) = x3/r, tan(phi) = x2/x1 (one fixed,
self-consistent choice).  One-argument function symbols differentiate
through their argument, and jet symbols of abstract three-variable
functions simply advance their multi-index.
"""

from __future__ import annotations

from fractions import Fraction

from . import _poly as P
from ._poly import (
    EMINUS, EPLUS, I, LNR, PHI, R, RT, THETA, X1, X2, X3,
    func_key, jet_key, param_key,
)

__all__ = [
    "Scalar", "Constraints", "ConstraintError", "DegenerateDenominator",
    "from_int", "from_fraction", "integer", "rational", "x", "x1", "x2",
    "x3", "r", "rt", "phi", "theta", "lnr", "eplus", "eminus", "iunit",
    "param", "func", "jet", "GENERATOR_NAMES",
]


class DegenerateDenominator(ValueError):
    """A denominator atom vanishes identically under the active constraints."""


class ConstraintError(ValueError):
    """Ill-formed parameter constraint set."""


# ---------------------------------------------------------------------------
# constraints: rewrite rules  p^2 -> RHS  applied at decision time

class Constraints:
    """A set of parameter rewrite rules ``name^2 = rhs``.

    The rules must be acyclic (a parameter's rhs may mention other
    constrained parameters, but no dependency loop) and each rhs must be
    free of the parameter it defines.  Reduction replaces every square of
    a constrained parameter until no rule applies; acyclicity makes the
    loop terminate and single-variable targets make it confluent.
    """

    __slots__ = ("rules",)

    def __init__(self, rules: dict[tuple, dict] | None = None):
        self.rules = dict(rules or {})
        self._validate()

    def _validate(self) -> None:
        deps: dict[tuple, set] = {}
        for key, rhs in self.rules.items():
            if key[0] != "p":
                raise ConstraintError("constraints may only target parameters")
            mention = {v for v in P.p_vars(rhs) if v[0] == "p"}
            if key in mention:
                raise ConstraintError(
                    f"constraint for {key[1]} mentions itself")
            deps[key] = {v for v in mention if v in self.rules}
        seen: set = set()
        stack: set = set()

        def visit(k):
            if k in stack:
                raise ConstraintError("cyclic parameter constraints")
            if k in seen:
                return
            stack.add(k)
            for nxt in deps.get(k, ()):
                visit(nxt)
            stack.discard(k)
            seen.add(k)

        for k in deps:
            visit(k)

    def __bool__(self) -> bool:
        return bool(self.rules)

    def reduce_poly(self, p: dict) -> dict:
        if not self.rules or not p:
            return p
        for _ in range(10_000):
            hit = None
            for mono in p:
                for v, e in mono:
                    if e >= 2 and v in self.rules:
                        hit = (mono, v, e)
                        break
                if hit:
                    break
            if hit is None:
                return p
            mono, v, e = hit
            coeff = p[mono]
            p = dict(p)
            del p[mono]
            rest = {v2: e2 for v2, e2 in mono if v2 != v}
            if e % 2:
                rest[v] = 1
            tail: dict = {}
            P._canon_term(rest, coeff, tail)
            repl = P.p_mul(P.p_pow(self.rules[v], e // 2), tail)
            p = P.p_add(p, repl)
        raise ConstraintError("constraint reduction did not terminate")


_NO_CONSTRAINTS = Constraints()


# ---------------------------------------------------------------------------
# denominator rationalization and atom bookkeeping

_UNIT_VARS = (I, EPLUS, EMINUS)


def _split_by_var(p: dict, v: tuple) -> tuple[dict, dict]:
    """Return (part without v, quotient of the v-part by v)."""
    plain: dict = {}
    carried: dict = {}
    for mono, c in p.items():
        d = dict(mono)
        if v in d:
            e = d.pop(v)
            if e > 1:
                d[v] = e - 1
            carried[P._mono_tuple(d)] = c
        else:
            plain[mono] = c
    return plain, carried


def _rationalize(p: dict) -> tuple[dict, dict]:
    """Multiply p by a cofactor until it is free of i, r and rt.

    Returns ``(cofactor, p * cofactor)``.  Sound because the radicals have
    square-free norms and the ring is a domain, so the conjugates used
    here never vanish for nonzero p.
    """
    cof = P.one()
    for v in (I, R, RT):
        plain, carried = _split_by_var(p, v)
        if carried:
            conj = P.p_sub(plain, P.mono_mul_var(carried, v))
            p = P.p_mul(p, conj)
            cof = P.p_mul(cof, conj)
    return cof, p


def _strip_unit_content(p: dict) -> tuple[dict, dict]:
    """Remove common E-exponential content from p.

    Returns ``(compensation, stripped)`` with ``p == stripped * E^content``
    and ``compensation = E^-content`` (what a fraction ``1/p`` must carry
    into its numerator when its denominator is replaced by ``stripped``).
    """
    comp = P.one()
    for v, inv in ((EPLUS, EMINUS), (EMINUS, EPLUS)):
        m = min((dict(mono).get(v, 0) for mono in p), default=0)
        if m:
            q = P.p_divexact(p, P.var_poly(v, m))
            assert q is not None
            p = q
            comp = P.mono_mul_var(comp, inv, m)
    return comp, p


_ATOM_POW: dict = {}


def _atom_pow(atom: tuple, k: int) -> dict:
    got = _ATOM_POW.get((atom, k))
    if got is None:
        got = P.p_pow(P.thaw(atom), k)
        _ATOM_POW[(atom, k)] = got
    return got


def _den_mul(a: dict, b: dict) -> dict:
    out = dict(a)
    for atom, e in b.items():
        out[atom] = out.get(atom, 0) + e
    return out


# ---------------------------------------------------------------------------
# Scalar

class Scalar:
    """An exact element of the coordinate ring's fraction field."""

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: dict | None = None, _reduce: bool = True):
        self.num = num
        self.den = den or {}
        if not self.num:
            self.den = {}
        elif _reduce and self.den:
            self._reduce()

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_poly(p: dict) -> "Scalar":
        return Scalar(p, None, _reduce=False)

    @staticmethod
    def constant(c) -> "Scalar":
        return Scalar(P.const(c), None, _reduce=False)

    # -- normalization --------------------------------------------------------

    # Reduction (cancelling denominator atoms out of the numerator) keeps
    # representations small; it never changes the value, and a fraction is
    # zero exactly when its numerator polynomial is zero, so skipping it is
    # always sound.  Beyond this size the division attempts cost more than
    # the cancellation could save, so large numerators are left unreduced.
    _REDUCE_LIMIT = 80

    def _reduce(self) -> None:
        num = self.num
        den = dict(self.den)
        if len(num) > Scalar._REDUCE_LIMIT:
            self.den = den
            return
        for atom in list(den):
            while den.get(atom, 0) > 0:
                q = P.p_divexact(num, P.thaw(atom))
                if q is None:
                    break
                num = q
                den[atom] -= 1
            if den.get(atom) == 0:
                del den[atom]
        self.num = num
        self.den = den

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        den: dict = {}
        atoms = set(self.den) | set(other.den)
        for atom in atoms:
            den[atom] = max(self.den.get(atom, 0), other.den.get(atom, 0))
        a = self.num
        b = other.num
        for atom, e in den.items():
            da = e - self.den.get(atom, 0)
            db = e - other.den.get(atom, 0)
            if da:
                a = P.p_mul(a, _atom_pow(atom, da))
            if db:
                b = P.p_mul(b, _atom_pow(atom, db))
        return Scalar(P.p_add(a, b), den)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(P.p_neg(self.num), dict(self.den), _reduce=False)

    def __sub__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(P.p_mul(self.num, other.num), _den_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("inverse of zero scalar")
        num = P.one()
        for atom, e in self.den.items():
            num = P.p_mul(num, _atom_pow(atom, e))
        cof, cleared = _rationalize(self.num)
        num = P.p_mul(num, cof)
        cont, prim = P.p_primitive(cleared)
        num = P.p_scale(num, 1 / cont)
        comp, prim = _strip_unit_content(prim)
        num = P.p_mul(num, comp)
        den: dict = {}
        if P.p_is_const(prim):
            num = P.p_scale(num, 1 / P.p_const_value(prim))
        elif len(prim) == 1:
            (mono, c), = prim.items()
            num = P.p_scale(num, 1 / c)
            for v, e in mono:
                if v == I:
                    # 1/i = -i
                    num = P.p_scale(P.mono_mul_var(num, I, e), (-1) ** e)
                elif v == EPLUS:
                    num = P.mono_mul_var(num, EMINUS, e)
                elif v == EMINUS:
                    num = P.mono_mul_var(num, EPLUS, e)
                else:
                    den[P.freeze(P.var_poly(v))] = e
        else:
            # split off any monomial gcd so x^2*(stuff) reduces at
            # variable granularity
            common: dict | None = None
            for mono in prim:
                d = dict(mono)
                if common is None:
                    common = d
                else:
                    common = {v: min(e, common[v]) for v, e in d.items() if v in common}
                if not common:
                    break
            if common:
                q = P.p_divexact(prim, {P._mono_tuple(dict(common)): Fraction(1)})
                assert q is not None
                prim = q
                for v, e in common.items():
                    den[P.freeze(P.var_poly(v))] = den.get(P.freeze(P.var_poly(v)), 0) + e
                cont2, prim = P.p_primitive(prim)
                num = P.p_scale(num, 1 / cont2)
            if not P.p_is_const(prim):
                atom = P.freeze(prim)
                den[atom] = den.get(atom, 0) + 1
            else:
                num = P.p_scale(num, 1 / P.p_const_value(prim))
        return Scalar(num, den)

    def __truediv__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- predicates -------------------------------------------------------------

    def is_zero(self, constraints: Constraints | None = None) -> bool:
        cons = constraints or _NO_CONSTRAINTS
        if cons:
            for atom in self.den:
                if not cons.reduce_poly(P.thaw(atom)):
                    raise DegenerateDenominator(
                        "denominator atom vanishes under the active constraints")
            return not cons.reduce_poly(self.num)
        return not self.num

    def equals(self, other, constraints: Constraints | None = None) -> bool:
        return (self - other).is_zero(constraints)

    def is_const(self) -> bool:
        return not self.den and P.p_is_const(self.num)

    def const_value(self) -> Fraction:
        if self.den:
            raise ValueError("scalar has a nontrivial denominator")
        return P.p_const_value(self.num)

    def as_poly(self) -> dict:
        if self.den:
            raise ValueError("scalar is not polynomial")
        return self.num

    def free_vars(self) -> set:
        out = P.p_vars(self.num)
        for atom in self.den:
            out |= P.p_vars(P.thaw(atom))
        return out

    # -- calculus ----------------------------------------------------------------

    def diff(self, a: int) -> "Scalar":
        """Partial derivative with respect to x_a (a in 1..3)."""
        out = _poly_diff(self.num, a)
        if self.den:
            out = Scalar(out.num, _den_mul(out.den, self.den))
            for atom, e in self.den.items():
                datom = _atom_diff(atom, a)
                if datom is not None:
                    term = Scalar(self.num, _den_mul(self.den, {atom: 1}))
                    out = out - Fraction(e) * term * datom
        return out

    def grad(self) -> tuple["Scalar", "Scalar", "Scalar"]:
        return (self.diff(1), self.diff(2), self.diff(3))

    # -- substitution ---------------------------------------------------------------

    def substitute(self, images: dict) -> "Scalar":
        """Replace variables by scalar images (coordinated map).

        ``images`` maps variable keys to Scalars; absent variables map to
        themselves.  The caller is responsible for supplying a coherent
        map (e.g. if x_a is rescaled, r must be given its matching image).
        """
        out = _poly_substitute(self.num, images)
        for atom, e in self.den.items():
            img = _poly_substitute(P.thaw(atom), images)
            out = out * img.inverse() ** e
        return out

    # -- misc -------------------------------------------------------------------------

    def key(self) -> tuple:
        """Hashable snapshot of the reduced representation."""
        return (P.freeze(self.num), tuple(sorted(self.den.items())))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        from .grammar import scalar_to_string
        return f"Scalar({scalar_to_string(self)})"


def _coerce(v) -> "Scalar":
    if isinstance(v, Scalar):
        return v
    if isinstance(v, (int, Fraction)):
        return Scalar.constant(v)
    return NotImplemented


# ---------------------------------------------------------------------------
# generator derivative table

def _S(num: dict, den: dict | None = None) -> Scalar:
    return Scalar(num, den, _reduce=False)


_SUMX2 = {((X1, 2),): Fraction(1), ((X2, 2),): Fraction(1), ((X3, 2),): Fraction(1)}
_SUMX12 = {((X1, 2),): Fraction(1), ((X2, 2),): Fraction(1)}
_A_SUMX2 = P.freeze(_SUMX2)
_A_SUMX12 = P.freeze(_SUMX12)


def _xp(v, e=1):
    return P.var_poly(v, e)


_VAR_DIFF: dict = {}


def _install_var_diffs() -> None:
    zero = Scalar.constant(0)
    for a, xa in ((1, X1), (2, X2), (3, X3)):
        _VAR_DIFF[(X1, a)] = Scalar.constant(1 if a == 1 else 0)
        _VAR_DIFF[(X2, a)] = Scalar.constant(1 if a == 2 else 0)
        _VAR_DIFF[(X3, a)] = Scalar.constant(1 if a == 3 else 0)
        _VAR_DIFF[(R, a)] = _S(P.p_mul(_xp(xa), _xp(R)), {_A_SUMX2: 1})
        _VAR_DIFF[(RT, a)] = (
            zero if a == 3 else _S(P.p_mul(_xp(xa), _xp(RT)), {_A_SUMX12: 1}))
        _VAR_DIFF[(LNR, a)] = _S(_xp(xa), {_A_SUMX2: 1})
    _VAR_DIFF[(PHI, 1)] = _S(P.p_neg(_xp(X2)), {_A_SUMX12: 1})
    _VAR_DIFF[(PHI, 2)] = _S(_xp(X1), {_A_SUMX12: 1})
    _VAR_DIFF[(PHI, 3)] = zero
    _VAR_DIFF[(THETA, 1)] = _S(
        P.p_mul(P.p_mul(_xp(X1), _xp(X3)), _xp(RT)), {_A_SUMX2: 1, _A_SUMX12: 1})
    _VAR_DIFF[(THETA, 2)] = _S(
        P.p_mul(P.p_mul(_xp(X2), _xp(X3)), _xp(RT)), {_A_SUMX2: 1, _A_SUMX12: 1})
    _VAR_DIFF[(THETA, 3)] = _S(P.p_neg(_xp(RT)), {_A_SUMX2: 1})
    for a in (1, 2, 3):
        _VAR_DIFF[(EPLUS, a)] = _S(_xp(EPLUS)) * _VAR_DIFF[(PHI, a)]
        _VAR_DIFF[(EMINUS, a)] = -_S(_xp(EMINUS)) * _VAR_DIFF[(PHI, a)]


_install_var_diffs()

_ARG_VAR = {"phi": PHI, "theta": THETA, "r": R, "rt": RT,
            "x1": X1, "x2": X2, "x3": X3, "lnr": LNR}


def _var_diff(v: tuple, a: int) -> Scalar | None:
    """Derivative of a single generator; None means identically zero."""
    got = _VAR_DIFF.get((v, a))
    if got is not None:
        return got if got.num else None
    kind = v[0]
    if kind in ("p", "i"):
        return None
    if kind == "f":
        _, name, arg, order = v
        u = _ARG_VAR[arg]
        du = _var_diff(u, a) if u[0] != "x" else (
            Scalar.constant(1) if u == ("x", a) else None)
        if du is None:
            return None
        return _S(_xp(func_key(name, arg, order + 1))) * du
    if kind == "j":
        _, name, a1, a2, a3 = v
        multi = [a1, a2, a3]
        multi[a - 1] += 1
        return _S(_xp(jet_key(name, tuple(multi))))
    raise KeyError(f"no derivative rule for variable {v!r}")


def _poly_diff(p: dict, a: int) -> Scalar:
    out = Scalar.constant(0)
    for mono, c in p.items():
        for idx, (v, e) in enumerate(mono):
            dv = _var_diff(v, a)
            if dv is None:
                continue
            rest = dict(mono)
            if e > 1:
                rest[v] = e - 1
            else:
                del rest[v]
            piece: dict = {}
            P._canon_term(rest, c * e, piece)
            out = out + _S(piece) * dv
    return out


_ATOM_DIFF_CACHE: dict = {}


def _atom_diff(atom: tuple, a: int) -> Scalar | None:
    key = (atom, a)
    if key not in _ATOM_DIFF_CACHE:
        d = _poly_diff(P.thaw(atom), a)
        _ATOM_DIFF_CACHE[key] = None if not d.num else d
    return _ATOM_DIFF_CACHE[key]


def _poly_substitute(p: dict, images: dict) -> Scalar:
    out = Scalar.constant(0)
    for mono, c in p.items():
        term = Scalar.constant(c)
        for v, e in mono:
            img = images.get(v)
            if img is None:
                term = term * _S(_xp(v, e))
            else:
                term = term * img ** e
        out = out + term
    return out


# ---------------------------------------------------------------------------
# public constructors

def from_int(n: int) -> Scalar:
    return Scalar.constant(n)


integer = from_int


def from_fraction(q) -> Scalar:
    return Scalar.constant(Fraction(q))


rational = from_fraction


def x(a: int) -> Scalar:
    return _S(_xp(("x", a)))


x1 = _S(_xp(X1))
x2 = _S(_xp(X2))
x3 = _S(_xp(X3))
r = _S(_xp(R))
rt = _S(_xp(RT))
phi = _S(_xp(PHI))
theta = _S(_xp(THETA))
lnr = _S(_xp(LNR))
eplus = _S(_xp(EPLUS))
eminus = _S(_xp(EMINUS))
iunit = _S(_xp(I))

GENERATOR_NAMES = {
    "x1": X1, "x2": X2, "x3": X3, "r": R, "rt": RT, "phi": PHI,
    "theta": THETA, "lnr": LNR,
}


def param(name: str) -> Scalar:
    return _S(_xp(param_key(name)))


def func(name: str, arg: str, order: int = 0) -> Scalar:
    """The ``order``-th derivative of function symbol ``name`` of one
    tower generator (``arg`` in x1,x2,x3,r,rt,phi,theta)."""
    if arg not in _ARG_VAR:
        raise ValueError(f"unsupported function argument {arg!r}")
    return _S(_xp(func_key(name, arg, order)))


def jet(name: str, multi: tuple[int, int, int] = (0, 0, 0)) -> Scalar:
    """Jet symbol of an abstract function of all three coordinates."""
    return _S(_xp(jet_key(name, multi)))
