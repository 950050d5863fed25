"""Text grammar for scalars, operators and parameter constraints.

Scalar expressions (used in the catalog file, the CLI and reports)::

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := ("-" | "+") factor | power
    power   := atom ("^" signed-int)?
    atom    := integer | "(" expr ")" | call-or-name
    call-or-name :=
          "exp" "(" ("phi" | "-phi") ")"      -> the exponential pair
        | "log" "(" "r" ")"                   -> the logarithmic generator
        | NAME "'"* "(" generator ")"         -> one-argument function symbol
        | NAME                                -> generator, "i", or parameter

Reserved generator names: ``x1 x2 x3 r rt phi theta i``.  Any other bare
identifier is a parameter; any other called identifier is a function
symbol of the named generator (primes select derivatives).

Operator expressions::

    oexpr   := oterm (("+" | "-") oterm)*
    oterm   := ofactor ("*" ofactor)*
    ofactor := ("-" | "+") ofactor | opower
    opower  := oatom ("^" int)?
    oatom   := "anti" "(" oexpr "," oexpr ")"   -> anticommutator
             | "comm" "(" oexpr "," oexpr ")"   -> commutator
             | "{" expr "}"                     -> multiplication operator
             | integer                          -> scalar multiple of the identity
             | "P1".."P3" | "K1".."K3" | "L1".."L3" | "D" | "H"
             | "(" oexpr ")"

``H`` refers to the Hamiltonian under consideration and is bound by the
caller.  Parameter constraints are written ``name^2 = <scalar-expr>``
with a polynomial, radical-free right-hand side.

Printing round-trips: ``parse_scalar(scalar_to_string(s))`` equals ``s``
exactly, and likewise for operators (whose coefficients are emitted in
momentum form, picking up powers of ``i``).
"""

from __future__ import annotations

import re
from fractions import Fraction

from . import _poly as P
from . import symexpr as S
from .symexpr import Scalar

__all__ = [
    "ParseError", "parse_scalar", "parse_operator", "parse_constraint",
    "parse_constraints", "scalar_to_string", "operator_to_string",
]


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)('*)|([-+*/^(){},=]))")

_GENERATORS = {
    "x1": P.X1, "x2": P.X2, "x3": P.X3, "r": P.R, "rt": P.RT,
    "phi": P.PHI, "theta": P.THETA, "lnr": P.LNR,
}
_FUNC_ARGS = ("phi", "theta", "r", "rt", "x1", "x2", "x3")


def _tokenize(text: str) -> list[tuple[str, object]]:
    out: list[tuple[str, object]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("name", (m.group(2), len(m.group(3)))))
        else:
            out.append(("op", m.group(4)))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"bad character at {text[pos:pos + 10]!r}")
    out.append(("end", None))
    return out


class _Cursor:
    __slots__ = ("toks", "i")

    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, ch: str) -> None:
        kind, val = self.next()
        if kind != "op" or val != ch:
            raise ParseError(f"expected {ch!r}, got {val!r}")


# ---------------------------------------------------------------------------
# scalar parsing

def _parse_signed_int(cur: _Cursor) -> int:
    sign = 1
    kind, val = cur.peek()
    while kind == "op" and val in "+-":
        cur.next()
        if val == "-":
            sign = -sign
        kind, val = cur.peek()
    kind, val = cur.next()
    if kind != "int":
        raise ParseError("expected an integer exponent")
    return sign * val


def _scalar_atom(cur: _Cursor) -> Scalar:
    kind, val = cur.next()
    if kind == "int":
        return Scalar.constant(val)
    if kind == "op" and val == "(":
        inner = _scalar_expr(cur)
        cur.expect_op(")")
        return inner
    if kind != "name":
        raise ParseError(f"unexpected token {val!r}")
    name, primes = val
    nkind, nval = cur.peek()
    called = nkind == "op" and nval == "("
    if not called:
        if primes:
            raise ParseError(f"derivative marks on non-call {name!r}")
        if name == "i":
            return S.iunit
        gen = _GENERATORS.get(name)
        if gen is not None:
            return Scalar(P.var_poly(gen), None, _reduce=False)
        return S.param(name)
    cur.next()  # consume "("
    if name == "exp":
        if primes:
            raise ParseError("exp takes no derivative marks")
        nkind, nval = cur.next()
        neg = nkind == "op" and nval == "-"
        if neg:
            nkind, nval = cur.next()
        if nkind != "name" or nval[0] != "phi" or nval[1]:
            raise ParseError("exp argument must be phi or -phi")
        cur.expect_op(")")
        return S.eminus if neg else S.eplus
    if name == "log":
        if primes:
            raise ParseError("log takes no derivative marks")
        nkind, nval = cur.next()
        if nkind != "name" or nval[0] != "r" or nval[1]:
            raise ParseError("log argument must be r")
        cur.expect_op(")")
        return S.lnr
    nkind, nval = cur.next()
    if nkind != "name" or nval[1] or nval[0] not in _FUNC_ARGS:
        raise ParseError(
            f"function argument must be one of {', '.join(_FUNC_ARGS)}")
    cur.expect_op(")")
    return S.func(name, nval[0], primes)


def _scalar_power(cur: _Cursor) -> Scalar:
    base = _scalar_atom(cur)
    kind, val = cur.peek()
    if kind == "op" and val == "^":
        cur.next()
        return base ** _parse_signed_int(cur)
    return base


def _scalar_factor(cur: _Cursor) -> Scalar:
    kind, val = cur.peek()
    if kind == "op" and val in "+-":
        cur.next()
        inner = _scalar_factor(cur)
        return -inner if val == "-" else inner
    return _scalar_power(cur)


def _scalar_term(cur: _Cursor) -> Scalar:
    out = _scalar_factor(cur)
    while True:
        kind, val = cur.peek()
        if kind == "op" and val == "*":
            cur.next()
            out = out * _scalar_factor(cur)
        elif kind == "op" and val == "/":
            cur.next()
            out = out / _scalar_factor(cur)
        else:
            return out


def _scalar_expr(cur: _Cursor) -> Scalar:
    out = _scalar_term(cur)
    while True:
        kind, val = cur.peek()
        if kind == "op" and val in "+-":
            cur.next()
            nxt = _scalar_term(cur)
            out = out - nxt if val == "-" else out + nxt
        else:
            return out


def parse_scalar(text: str) -> Scalar:
    cur = _Cursor(_tokenize(text))
    out = _scalar_expr(cur)
    if cur.peek()[0] != "end":
        raise ParseError(f"trailing input in scalar {text!r}")
    return out


# ---------------------------------------------------------------------------
# constraints

def parse_constraint(text: str) -> tuple[tuple, dict]:
    """Parse ``name^2 = rhs`` into (parameter key, rhs polynomial)."""
    if "=" not in text:
        raise ParseError("constraint must contain '='")
    lhs, rhs = text.split("=", 1)
    m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*\^\s*2\s*", lhs)
    if not m:
        raise ParseError(f"constraint left side must be 'name^2': {lhs!r}")
    name = m.group(1)
    if name in _GENERATORS or name in ("i", "exp", "log"):
        raise ParseError(f"cannot constrain reserved name {name!r}")
    val = parse_scalar(rhs)
    try:
        rhs_poly = val.as_poly()
    except ValueError:
        raise ParseError("constraint right side must be polynomial") from None
    for v in P.p_vars(rhs_poly):
        if v[0] != "p":
            raise ParseError("constraint right side may mention parameters only")
    return P.param_key(name), rhs_poly


def parse_constraints(texts) -> S.Constraints:
    rules = {}
    for t in texts:
        key, rhs = parse_constraint(t)
        if key in rules:
            raise ParseError(f"duplicate constraint for {key[1]}")
        rules[key] = rhs
    return S.Constraints(rules)


# ---------------------------------------------------------------------------
# printing

_VAR_NAMES = {P.X1: "x1", P.X2: "x2", P.X3: "x3", P.R: "r", P.RT: "rt",
              P.PHI: "phi", P.THETA: "theta", P.I: "i",
              P.EPLUS: "exp(phi)", P.EMINUS: "exp(-phi)", P.LNR: "log(r)"}


def _var_str(v: tuple) -> str:
    got = _VAR_NAMES.get(v)
    if got is not None:
        return got
    kind = v[0]
    if kind == "p":
        return v[1]
    if kind == "f":
        _, name, arg, order = v
        primes = "'" * order
        return f"{name}{primes}({arg})"
    if kind == "j":
        _, name, a1, a2, a3 = v
        return f"{name}[{a1},{a2},{a3}]"
    raise ValueError(f"unprintable variable {v!r}")


def _mono_str(mono: tuple, coeff: Fraction) -> tuple[int, str]:
    """Return (sign, body) for one monomial term."""
    sign = 1 if coeff >= 0 else -1
    coeff = abs(coeff)
    parts = []
    if coeff.numerator != 1 or not mono:
        parts.append(str(coeff.numerator))
    for v, e in mono:
        vs = _var_str(v)
        parts.append(f"{vs}^{e}" if e != 1 else vs)
    body = "*".join(parts)
    if coeff.denominator != 1:
        body += f"/{coeff.denominator}"
    return sign, body


def poly_to_string(p: dict) -> str:
    if not p:
        return "0"
    items = sorted(p.items(), key=lambda mc: P.mono_sort(mc[0]), reverse=True)
    out = []
    for mono, c in items:
        sign, body = _mono_str(mono, c)
        if not out:
            out.append(body if sign > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if sign > 0 else f" - {body}")
    return "".join(out)


def scalar_to_string(s: Scalar) -> str:
    num = poly_to_string(s.num)
    if not s.den:
        return num
    dparts = []
    for atom, e in sorted(s.den.items()):
        apoly = P.thaw(atom)
        astr = poly_to_string(apoly)
        if len(apoly) > 1:
            astr = f"({astr})"
        dparts.append(f"{astr}^{e}" if e != 1 else astr)
    den = "*".join(dparts)
    if len(dparts) > 1:
        den = f"({den})"
    if len(s.num) > 1 or num.startswith("-") or "/" in num:
        num = f"({num})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# operator parsing / printing (the operator type lives in diffop)

def _op_atom(cur: _Cursor, ops):
    from . import diffop as DO
    kind, val = cur.next()
    if kind == "int":
        return DO.scalar_op(Scalar.constant(val))
    if kind == "op" and val == "(":
        inner = _op_expr(cur, ops)
        cur.expect_op(")")
        return inner
    if kind == "op" and val == "{":
        inner = _scalar_expr(cur)
        cur.expect_op("}")
        return DO.scalar_op(inner)
    if kind != "name":
        raise ParseError(f"unexpected token {val!r} in operator")
    name, primes = val
    if primes:
        raise ParseError("derivative marks are not operator syntax")
    if name in ("anti", "comm"):
        cur.expect_op("(")
        a = _op_expr(cur, ops)
        cur.expect_op(",")
        b = _op_expr(cur, ops)
        cur.expect_op(")")
        return DO.anticommutator(a, b) if name == "anti" else DO.commutator(a, b)
    got = ops.get(name)
    if got is None:
        raise ParseError(f"unknown operator atom {name!r}")
    return got


def _op_power(cur: _Cursor, ops):
    from . import diffop as DO
    base = _op_atom(cur, ops)
    kind, val = cur.peek()
    if kind == "op" and val == "^":
        cur.next()
        n = _parse_signed_int(cur)
        if n < 0:
            raise ParseError("operator powers must be non-negative")
        out = DO.identity_op()
        for _ in range(n):
            out = DO.compose(out, base)
        return out
    return base


def _op_factor(cur: _Cursor, ops):
    from . import diffop as DO
    kind, val = cur.peek()
    if kind == "op" and val in "+-":
        cur.next()
        inner = _op_factor(cur, ops)
        return DO.op_neg(inner) if val == "-" else inner
    return _op_power(cur, ops)


def _op_term(cur: _Cursor, ops):
    from . import diffop as DO
    out = _op_factor(cur, ops)
    while True:
        kind, val = cur.peek()
        if kind == "op" and val == "*":
            cur.next()
            out = DO.compose(out, _op_factor(cur, ops))
        else:
            return out


def _op_expr(cur: _Cursor, ops):
    from . import diffop as DO
    out = _op_term(cur, ops)
    while True:
        kind, val = cur.peek()
        if kind == "op" and val in "+-":
            cur.next()
            nxt = _op_term(cur, ops)
            out = DO.op_sub(out, nxt) if val == "-" else DO.op_add(out, nxt)
        else:
            return out


def parse_operator(text: str, hamiltonian=None, extra=None):
    """Parse an operator expression; ``hamiltonian`` binds the H token and
    ``extra`` maps additional operator names (e.g. N1, N2, N3) to operator
    dicts."""
    from . import diffop as DO
    ops = dict(DO.conformal_atoms())
    if hamiltonian is not None:
        ops["H"] = hamiltonian
    if extra:
        ops.update(extra)
    cur = _Cursor(_tokenize(text))
    out = _op_expr(cur, ops)
    if cur.peek()[0] != "end":
        raise ParseError(f"trailing input in operator {text!r}")
    return out


def operator_to_string(op) -> str:
    """Momentum-form printing: each d^alpha is written i^|alpha| P^alpha."""
    if not op:
        return "0"
    parts = []
    for alpha in sorted(op, key=lambda a: (sum(a), a)):
        coeff = op[alpha]
        k = sum(alpha)
        if k:
            coeff = coeff * (S.iunit ** k)
        cs = scalar_to_string(coeff)
        pfactors = []
        for axis, e in zip((1, 2, 3), alpha):
            if e:
                pfactors.append(f"P{axis}^{e}" if e > 1 else f"P{axis}")
        if pfactors:
            parts.append(f"{{{cs}}}*" + "*".join(pfactors))
        else:
            parts.append(f"{{{cs}}}")
    return " + ".join(parts)
