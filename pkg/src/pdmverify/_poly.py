"""Sparse exact arithmetic for the radical/angular coordinate ring.

Everything the engine proves is decided inside one fixed differential
ring: polynomials with Fraction coefficients in

* the Cartesian coordinates ``x1, x2, x3``,
* two radicals ``r``, ``rt`` with monomial rewrites
  ``r^2 -> x1^2 + x2^2 + x3^2`` and ``rt^2 -> x1^2 + x2^2``
  (canonical exponents are therefore 0 or 1),
* the imaginary unit ``i`` with ``i^2 -> -1``,
* the exponential pair ``E+ = e^phi``, ``E- = e^-phi`` with the joint
  rewrite ``E+ * E- -> 1`` (keeping both exponents non-negative),
* transcendental scalars ``phi``, ``theta``, ``lnr`` (no rewrites),
* named real parameters,
* derivative towers of named one-argument function symbols, keyed by
  ``(name, argument, order)`` — ``F``, ``F'``, ``F''``, ... of ``phi``,
  ``theta``, ``r``, ... — and
* jet symbols ``g[a1,a2,a3]`` for abstract functions of all three
  coordinates, keyed by name and derivative multi-index.

A polynomial is a dict mapping monomials to nonzero Fractions; a
monomial is a tuple of ``(variable key, positive exponent)`` pairs in a
fixed total order.  The rewrites are confluent (they touch disjoint
variables, or in the E case a single graded pair), so equal ring
elements always canonicalize to identical dicts and the zero test is
literal emptiness.  The ring is an integral domain: the angular and
exponential generators are algebraically independent over the rational
function field in x, and the radicals generate a quadratic extension
with square-free norms, so a product of nonzero elements never
collapses.

Only plain dict/tuple/Fraction machinery lives here; calculus and
fractions-of-polynomials are layered on top in :mod:`pdmverify.symexpr`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

__all__ = [
    "I", "X1", "X2", "X3", "R", "RT", "PHI", "THETA", "LNR", "EPLUS",
    "EMINUS", "param_key", "func_key", "jet_key", "vkey_sort", "mono_sort",
    "ZERO", "one", "const", "var_poly", "p_is_const", "p_const_value",
    "p_add", "p_sub", "p_neg", "p_scale", "p_mul", "p_pow", "p_vars",
    "p_divexact", "p_content", "p_primitive", "freeze", "thaw",
    "mono_mul_var",
]

# ---------------------------------------------------------------------------
# variable keys

I = ("i",)
X1, X2, X3 = ("x", 1), ("x", 2), ("x", 3)
R = ("q", "r")
RT = ("q", "rt")
PHI = ("t", "phi")
THETA = ("t", "theta")
LNR = ("t", "lnr")
EPLUS = ("e", 1)
EMINUS = ("e", -1)

_KIND_RANK = {"i": 0, "x": 1, "q": 2, "t": 3, "e": 4, "p": 5, "f": 6, "j": 7}


def param_key(name: str) -> tuple:
    return ("p", name)


def func_key(name: str, arg: str, order: int = 0) -> tuple:
    """Key for the ``order``-th derivative of function symbol ``name(arg)``."""
    return ("f", name, arg, order)


def jet_key(name: str, multi: tuple[int, int, int]) -> tuple:
    """Key for an abstract-function jet: ``name`` differentiated ``multi`` times."""
    a1, a2, a3 = multi
    return ("j", name, a1, a2, a3)


def vkey_sort(v: tuple):
    """Total order on variable keys (ints and strings never compared raw)."""
    return (_KIND_RANK[v[0]], tuple((0, e) if isinstance(e, int) else (1, e) for e in v[1:]))


def mono_sort(mono: tuple):
    """Graded order key for a monomial: total degree, then variable-wise."""
    return (sum(e for _, e in mono), tuple((vkey_sort(v), e) for v, e in mono))


# ---------------------------------------------------------------------------
# canonicalization

_R2 = {((X1, 2),): Fraction(1), ((X2, 2),): Fraction(1), ((X3, 2),): Fraction(1)}
_RT2 = {((X1, 2),): Fraction(1), ((X2, 2),): Fraction(1)}

ZERO: dict = {}


def _mono_tuple(exps: dict) -> tuple:
    return tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda ve: vkey_sort(ve[0])))


def _canon_term(exps: dict, coeff: Fraction, out: dict) -> None:
    """Canonicalize one raw term and merge it into the accumulator ``out``.

    ``exps`` maps variable keys to (possibly rewritable) exponents.  The i,
    E and radical rewrites are applied here; radical expansion multiplies
    in pure-x polynomials, which cannot trigger further rewrites.
    """
    ei = exps.get(I, 0)
    if ei >= 2:
        if (ei // 2) % 2:
            coeff = -coeff
        exps[I] = ei % 2
    ep, em = exps.get(EPLUS, 0), exps.get(EMINUS, 0)
    if ep and em:
        m = min(ep, em)
        exps[EPLUS], exps[EMINUS] = ep - m, em - m
    er, ert = exps.get(R, 0), exps.get(RT, 0)
    if er >= 2 or ert >= 2:
        exps[R], exps[RT] = er % 2, ert % 2
        rest = {_mono_tuple(exps): coeff}
        expand = p_mul(_pow_cached(_R2, er // 2), _pow_cached(_RT2, ert // 2))
        for mono, c in p_mul(expand, rest).items():
            out[mono] = out.get(mono, Fraction(0)) + c
            if not out[mono]:
                del out[mono]
        return
    mono = _mono_tuple(exps)
    out[mono] = out.get(mono, Fraction(0)) + coeff
    if not out[mono]:
        del out[mono]


_POW_CACHE: dict = {}


def _pow_cached(base: dict, n: int) -> dict:
    if n == 0:
        return {(): Fraction(1)}
    key = (id(base), n)
    got = _POW_CACHE.get(key)
    if got is None:
        got = p_mul(_pow_cached(base, n - 1), base)
        _POW_CACHE[key] = got
    return got


# ---------------------------------------------------------------------------
# constructors and basic ops

def one() -> dict:
    return {(): Fraction(1)}


def const(c) -> dict:
    c = Fraction(c)
    return {(): c} if c else {}


def var_poly(v: tuple, exp: int = 1) -> dict:
    out: dict = {}
    _canon_term({v: exp}, Fraction(1), out)
    return out


def p_is_const(p: dict) -> bool:
    return not p or (len(p) == 1 and () in p)


def p_const_value(p: dict) -> Fraction:
    if not p:
        return Fraction(0)
    if len(p) == 1 and () in p:
        return p[()]
    raise ValueError("polynomial is not constant")


def p_add(a: dict, b: dict) -> dict:
    if not a:
        return dict(b)
    out = dict(a)
    for mono, c in b.items():
        s = out.get(mono, Fraction(0)) + c
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return out


def p_neg(a: dict) -> dict:
    return {m: -c for m, c in a.items()}


def p_sub(a: dict, b: dict) -> dict:
    return p_add(a, p_neg(b))


def p_scale(a: dict, c) -> dict:
    c = Fraction(c)
    if not c:
        return {}
    return {m: cc * c for m, cc in a.items()}


def p_mul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    out: dict = {}
    for ma, ca in a.items():
        da = dict(ma)
        for mb, cb in b.items():
            exps = dict(da)
            for v, e in mb:
                exps[v] = exps.get(v, 0) + e
            _canon_term(exps, ca * cb, out)
    return out


def mono_mul_var(p: dict, v: tuple, exp: int = 1) -> dict:
    """Multiply a polynomial by a single variable power (canonical)."""
    return p_mul(p, var_poly(v, exp))


def p_pow(a: dict, n: int) -> dict:
    if n < 0:
        raise ValueError("negative power at the polynomial level")
    out = one()
    base = a
    while n:
        if n & 1:
            out = p_mul(out, base)
        base = p_mul(base, base) if n > 1 else base
        n >>= 1
    return out


def p_vars(p: dict) -> set:
    seen: set = set()
    for mono in p:
        for v, _ in mono:
            seen.add(v)
    return seen


# ---------------------------------------------------------------------------
# exact division

_UNIT_KINDS = ("i", "e")


def _mono_div(mn: tuple, md: tuple):
    """Divide monomials allowing the unit variables i, E+- to go negative.

    Returns (exps, iflip) where exps is the quotient exponent dict with the
    E pair re-balanced and i reduced, iflip the sign picked up from i^-2k,
    or None when division requires a negative power of a non-unit.
    """
    exps = dict(mn)
    for v, e in md:
        exps[v] = exps.get(v, 0) - e
    sign = 1
    ei = exps.pop(I, 0)
    if ei:
        if (ei // 2) % 2:
            sign = -sign
        ei %= 2
        if ei:
            exps[I] = ei
    charge = exps.pop(EPLUS, 0) - exps.pop(EMINUS, 0)
    if charge > 0:
        exps[EPLUS] = charge
    elif charge < 0:
        exps[EMINUS] = -charge
    for v, e in exps.items():
        if e < 0:
            return None
    return exps, sign


def p_divexact(n: dict, d: dict):
    """Exact quotient n / d in the ring, or None when d does not divide n.

    Single-monomial divisors get full unit handling (i and the E pair are
    invertible).  Multi-term divisors use classical long division in the
    graded order, treating every variable as an ordinary polynomial
    variable; that is sound (a reported quotient is always exact) and
    terminating, at the price of declining some exotic unit-mixing
    divisions that never arise from the catalog.
    """
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    if not n:
        return {}
    if len(d) == 1:
        (md, cd), = d.items()
        out: dict = {}
        for mn, cn in n.items():
            got = _mono_div(mn, md)
            if got is None:
                return None
            exps, sign = got
            _canon_term(exps, cn / cd * sign, out)
        return out
    # Long division in a graded lexicographic order made dense over the
    # union of variables; a sparse tuple order is not multiplicative, and
    # division needs lead(Q*D) = lead(Q)*lead(D) to be reliable.
    vars_all = sorted(p_vars(n) | p_vars(d), key=vkey_sort)
    vpos = {v: i for i, v in enumerate(vars_all)}

    _dense_cache: dict = {}

    def dense(mono: tuple):
        got = _dense_cache.get(mono)
        if got is None:
            vec = [0] * len(vars_all)
            deg = 0
            for v, e in mono:
                vec[vpos[v]] = e
                deg += e
            got = (deg, tuple(vec))
            _dense_cache[mono] = got
        return got

    # graded order makes total degree additive, so a lower-degree
    # numerator can never be a multiple
    if max(sum(e for _, e in m) for m in n) < max(sum(e for _, e in m) for m in d):
        return None

    lead_d = max(d, key=dense)
    cd = d[lead_d]
    dd = dict(lead_d)
    rem = dict(n)
    quo: dict = {}
    while rem:
        lead_n = max(rem, key=dense)
        exps = dict(lead_n)
        for v, e in dd.items():
            exps[v] = exps.get(v, 0) - e
            if exps[v] < 0:
                return None
        t = {_mono_tuple(exps): rem[lead_n] / cd}
        for mono, c in t.items():
            quo[mono] = quo.get(mono, Fraction(0)) + c
        rem = p_sub(rem, p_mul(t, d))
        if lead_n in rem:  # leading term failed to cancel: not divisible
            return None
    return quo


# ---------------------------------------------------------------------------
# content, primitive part, freezing

def p_content(p: dict) -> Fraction:
    """Positive rational content; sign chosen so the leading coefficient
    of the primitive part is positive."""
    if not p:
        return Fraction(1)
    num = 0
    den = 1
    for c in p.values():
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    cont = Fraction(num, den)
    if p[max(p, key=mono_sort)] < 0:
        cont = -cont
    return cont


def p_primitive(p: dict) -> tuple[Fraction, dict]:
    cont = p_content(p)
    if cont == 1:
        return cont, p
    return cont, {m: c / cont for m, c in p.items()}


def freeze(p: dict) -> tuple:
    """Hashable canonical snapshot (sorted item tuple)."""
    return tuple(sorted(p.items(), key=lambda mc: mono_sort(mc[0])))


def thaw(fp: tuple) -> dict:
    return dict(fp)
