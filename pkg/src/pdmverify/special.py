"""Scale-invariant potential machinery for the f = x3^2 family.

Inverse masses proportional to x3^2 admit a two-parameter bilinear family
of second-order integrals.  Compatibility of the resulting first-order
system for eta forces a single second-order PDE on the potential, which
becomes constant-coefficient-like in a canonical pair of variables (x, y)
quadratic in the scale-invariant ratios y1 = x1/x3, y2 = x2/x3.  This
module builds those variables, the compatibility residuals, the polynomial
solution family, and the closed-form rational solution, all exactly.

Conventions: expressions "in y1, y2" or "in x, y" are tower scalars whose
dependence on those variables is carried by parameter symbols named
``y1``, ``y2`` (resp. ``x``, ``y``); ``param_diff`` differentiates with
respect to a parameter symbol.

Printed-source quirks (kept, never silently fixed):

* the canonical PDE is displayed as a double equality
  "V_yy = y V_xy + x V_xx + 2 V_x = 0"; the two readings differ.  Reading
  A (V_yy - y V_xy - x V_xx - 2 V_x = 0) annihilates the printed
  polynomial family; reading B (y V_xy + x V_xx + 2 V_x = 0 together with
  V_yy = 0) does not.  ``pde_residual`` implements reading A;
  ``pde_residual_reading_b`` keeps reading B for the regression test that
  pins the resolution.
* the closed-form coefficient display for the polynomial family is
  garbled in the source; the binomial reading C(s-k, k) reproduces the
  printed low-order list exactly and is cross-checked by an independent
  term-by-term recurrence oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import _poly as P
from . import symexpr as S
from .symexpr import Scalar

__all__ = [
    "DegenerateParameters",
    "PolyPotential",
    "param_diff",
    "scale_vars",
    "compat_residual",
    "canonical_vars",
    "pde_residual",
    "pde_residual_reading_b",
    "poly_potential",
    "poly_potential_recurrence",
    "rational_potential",
    "new1_residual",
]

_ZERO = Scalar.constant(0)
_AXES = (1, 2, 3)


class DegenerateParameters(ValueError):
    """Parameter values outside the generic stratum of the construction."""


# ---------------------------------------------------------------------------
# parameter calculus


def _p_diff_param(poly: dict, key) -> dict:
    out: dict = {}
    for mono, cf in poly.items():
        for i, (v, e) in enumerate(mono):
            if v == key:
                new = mono[:i] + ((v, e - 1),) if e > 1 else mono[:i]
                new = new + mono[i + 1:]
                cur = out.get(new, Fraction(0))
                cur += cf * e
                if cur:
                    out[new] = cur
                elif new in out:
                    del out[new]
                break
    return out


def param_diff(s: Scalar, name: str) -> Scalar:
    """Exact derivative of a tower scalar w.r.t. the parameter ``name``."""
    key = ("p", name)
    out = Scalar(_p_diff_param(s.num, key), dict(s.den))
    for atom, e in s.den.items():
        da = _p_diff_param(P.thaw(atom), key)
        if not da:
            continue
        den = dict(s.den)
        den[atom] = e + 1
        out = out - Scalar.constant(e) * Scalar(P.p_mul(s.num, da), den)
    return out


# ---------------------------------------------------------------------------
# scale-invariant and canonical variables


def scale_vars() -> tuple:
    """The two scale-invariant ratios (x1/x3, x2/x3)."""
    return (S.x1 / S.x3, S.x2 / S.x3)


def compat_residual(V: Scalar, a=None, b=None) -> Scalar:
    """Residual of the compatibility PDE in the scale-invariant variables:

        (a y2^2 - b y1^2 + a - b) V_{y1 y2}
          + y1 y2 (a V_{y1 y1} - b V_{y2 y2})
          + 3 (a y2 V_{y1} - b y1 V_{y2}).

    ``V`` depends on y1, y2 through parameter symbols; ``a``/``b`` default
    to the parameter symbols of the same name.
    """
    a = a if a is not None else S.param("a")
    b = b if b is not None else S.param("b")
    y1 = S.param("y1")
    y2 = S.param("y2")
    V1 = param_diff(V, "y1")
    V2 = param_diff(V, "y2")
    V12 = param_diff(V1, "y2")
    V11 = param_diff(V1, "y1")
    V22 = param_diff(V2, "y2")
    three = Scalar.constant(3)
    return (
        (a * y2 * y2 - b * y1 * y1 + a - b) * V12
        + y1 * y2 * (a * V11 - b * V22)
        + three * (a * y2 * V1 - b * y1 * V2)
    )


def canonical_vars(a=None, b=None) -> tuple:
    """Canonical quadratic variables (x, y) in terms of y1, y2:

        x = a y1^2 - b y2^2 + a b (b - a),
        y = (b y1^2 + a y2^2 + (a - b)(a^2 - b^2)) / s0,

    with s0 a declared parameter satisfying s0^2 = a b (b - a) (the
    square root stays formal; positivity is a numeric-level concern).
    Literal a = b or a b = 0 is outside the construction.
    """
    a = a if a is not None else S.param("a")
    b = b if b is not None else S.param("b")
    if (a - b).is_zero() or (a * b).is_zero():
        raise DegenerateParameters("canonical variables need a != b, ab != 0")
    y1 = S.param("y1")
    y2 = S.param("y2")
    s0 = S.param("s0")
    x = a * y1 * y1 - b * y2 * y2 + a * b * (b - a)
    y = (b * y1 * y1 + a * y2 * y2 + (a - b) * (a * a - b * b)) / s0
    return (x, y)


def pde_residual(V: Scalar) -> Scalar:
    """Residual of the canonical PDE, reading A of the printed double
    equality:  V_{yy} - y V_{xy} - x V_{xx} - 2 V_x."""
    xp = S.param("x")
    yp = S.param("y")
    Vx = param_diff(V, "x")
    Vy = param_diff(V, "y")
    return (
        param_diff(Vy, "y")
        - yp * param_diff(Vx, "y")
        - xp * param_diff(Vx, "x")
        - Scalar.constant(2) * Vx
    )


def pde_residual_reading_b(V: Scalar) -> tuple:
    """Reading B of the printed double equality: the pair
    (y V_{xy} + x V_{xx} + 2 V_x,  V_{yy}) both required to vanish.
    Kept only so the reading-selection regression can re-run."""
    xp = S.param("x")
    yp = S.param("y")
    Vx = param_diff(V, "x")
    Vy = param_diff(V, "y")
    first = (
        yp * param_diff(Vx, "y")
        + xp * param_diff(Vx, "x")
        + Scalar.constant(2) * Vx
    )
    return (first, param_diff(Vy, "y"))


# ---------------------------------------------------------------------------
# polynomial potential family


@dataclass(frozen=True)
class PolyPotential:
    """Degree-s member of the polynomial solution family.

    expr = sum_{k=0..floor(s/2)} C(s-k, k) x^k y^(s-2k); every term has
    weighted degree deg_y + 2 deg_x = s, and the leading term is y^s.
    delta is the parity s mod 2 (odd members contain a bare y-power,
    even members end in x^(s/2))."""

    s: int
    expr: Scalar
    delta: int

    def weighted_degree_ok(self) -> bool:
        xkey = ("p", "x")
        ykey = ("p", "y")
        for mono in self.expr.num:
            dx = sum(e for v, e in mono if v == xkey)
            dy = sum(e for v, e in mono if v == ykey)
            if dy + 2 * dx != self.s:
                return False
        return True


def poly_potential(s: int) -> PolyPotential:
    """Closed-form polynomial solution of the canonical PDE."""
    if s < 1:
        raise ValueError("polynomial family starts at s = 1")
    xp = S.param("x")
    yp = S.param("y")
    expr = _ZERO
    for k in range(s // 2 + 1):
        term = Scalar.constant(comb(s - k, k))
        expr = expr + term * xp ** k * yp ** (s - 2 * k)
    return PolyPotential(s=s, expr=expr, delta=s % 2)


def poly_potential_recurrence(s: int) -> Scalar:
    """Independent oracle: build the same polynomial by solving the
    canonical PDE term by term downward from the leading term y^s.  At
    monomial x^k y^(s-2k-2) the PDE couples adjacent coefficients as

        c_{k+1} (k+1)(s-k) = c_k (s-2k)(s-2k-1),

    which determines everything from c_0 = 1."""
    if s < 1:
        raise ValueError("polynomial family starts at s = 1")
    xp = S.param("x")
    yp = S.param("y")
    c = Fraction(1)
    expr = yp ** s
    for k in range(s // 2):
        c = c * Fraction((s - 2 * k) * (s - 2 * k - 1), (k + 1) * (s - k))
        expr = expr + S.rational(c) * xp ** (k + 1) * yp ** (s - 2 * k - 2)
    return expr


# ---------------------------------------------------------------------------
# rational potential


def rational_potential(alpha=None, kappa=None, mu=None, omega=None) -> tuple:
    """The closed-form rational solution and its scalar part:

        V = alpha x3^2 / ((k^2-k w) x1^2 + (m^2-m w) x2^2 - (k-w)(m-w) x3^2),
        eta = ((k x1^2 + m x2^2 + w x3^2) / x3^2) V,

    with (k, m, w) = (kappa, mu, omega).  A denominator that collapses to
    zero under the given parameters is outside the construction.
    """
    alpha = alpha if alpha is not None else S.param("alpha")
    kappa = kappa if kappa is not None else S.param("kappa")
    mu = mu if mu is not None else S.param("mu")
    omega = omega if omega is not None else S.param("omega")
    x1, x2, x3 = S.x1, S.x2, S.x3
    den = (
        (kappa * kappa - kappa * omega) * x1 * x1
        + (mu * mu - mu * omega) * x2 * x2
        - (kappa - omega) * (mu - omega) * x3 * x3
    )
    if den.is_zero():
        raise DegenerateParameters("rational potential denominator vanishes")
    V = alpha * x3 * x3 / den
    eta = ((kappa * x1 * x1 + mu * x2 * x2 + omega * x3 * x3) / (x3 * x3)) * V
    return (V, eta)


def new1_residual(V: Scalar, eta: Scalar, mu_c=None, kappa_c=None) -> tuple:
    """Residuals of the two-component linear system tying eta to V for the
    bilinear integral family at f = x3^2 (entries of the printed mass
    matrix contracted with grad V):

        mu (x2^2 + x3^2) V_1 - kappa x1 x2 V_2 - x3^2 eta_1,
        kappa (x1^2 + x3^2) V_2 - mu x1 x2 V_1 - x3^2 eta_2.
    """
    mu_c = mu_c if mu_c is not None else S.param("mu")
    kappa_c = kappa_c if kappa_c is not None else S.param("kappa")
    x1, x2, x3 = S.x1, S.x2, S.x3
    V1 = V.diff(1)
    V2 = V.diff(2)
    r1 = mu_c * (x2 * x2 + x3 * x3) * V1 - kappa_c * x1 * x2 * V2 - x3 * x3 * eta.diff(1)
    r2 = kappa_c * (x1 * x1 + x3 * x3) * V2 - mu_c * x1 * x2 * V1 - x3 * x3 * eta.diff(2)
    return (r1, r2)
