"""Conformal Killing tensor families on flat 3-space and their residual check.

A second-order conformal Killing tensor (CKT) here is a symmetric matrix
mu^{ab} of tower scalars satisfying the traceless part of the third-order
coefficient system of [H, Q]:

    5 (mu^{ab}_c + mu^{ac}_b + mu^{bc}_a)
        = delta^{ab} (mu^{nn}_c + 2 mu^{cn}_n)
        + delta^{bc} (mu^{nn}_a + 2 mu^{an}_n)
        + delta^{ac} (mu^{nn}_b + 2 mu^{bn}_n).

The module builds the ten classical families of solutions that the
classification rests on (tags family_0..family_9), plus the three
homogeneous specializations of polynomial degree n = 0, 1, 2 used for the
scale-invariant systems (tags hom_0..hom_2).

Two of the printed family definitions contain apparent typos (an "r^2"
where a coordinate x^a is expected, and a coefficient vector missing its
subscript).  Both variants are constructible: the default is the repaired
form, and ``printed=True`` yields the literal one so the residual check can
decide which is actually a CKT.  Trace terms delta^{ab} g(x) are CKTs for
arbitrary g, so the families carry abstract functions phi_k in their trace
parts (represented by jet symbols, closed under differentiation).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import symexpr as S
from .symexpr import Scalar

__all__ = [
    "KillingTensor",
    "BadFamilySpec",
    "ckt_family",
    "homogeneous_tensor",
    "ckt_residual",
    "residual_is_zero",
    "is_symmetric",
    "FAMILY_TAGS",
]


class BadFamilySpec(ValueError):
    """Family index or parameter binding does not match the family's arity."""


# Levi-Civita symbol, 1-based indices.
def _eps(a: int, b: int, c: int) -> int:
    return ((a - b) * (b - c) * (c - a)) // 2


_X = {1: S.x1, 2: S.x2, 3: S.x3}
_R2 = S.x1 * S.x1 + S.x2 * S.x2 + S.x3 * S.x3


def _sym_matrix(prefix: str) -> dict:
    """Symmetric 3x3 parameter matrix as params named <prefix>_ab (a<=b)."""
    m = {}
    for a in range(1, 4):
        for b in range(1, 4):
            i, j = min(a, b), max(a, b)
            m[(a, b)] = S.param(f"{prefix}_{i}{j}")
    return m


def _vector(prefix: str) -> dict:
    return {a: S.param(f"{prefix}_{a}") for a in range(1, 4)}


def _fn(name: str) -> Scalar:
    """Abstract function of all three coordinates (jet symbol, order 0)."""
    return S.jet(name, (0, 0, 0))


@dataclass(frozen=True)
class KillingTensor:
    """Symmetric (by intent) matrix of tower scalars with a family tag."""

    entries: tuple  # ((m11,m12,m13),(m21,m22,m23),(m31,m32,m33))
    tag: str

    def __getitem__(self, ab) -> Scalar:
        a, b = ab
        return self.entries[a - 1][b - 1]

    @staticmethod
    def from_fn(fn, tag: str) -> "KillingTensor":
        rows = tuple(tuple(fn(a, b) for b in range(1, 4)) for a in range(1, 4))
        return KillingTensor(rows, tag)

    def scaled(self, c: Scalar) -> "KillingTensor":
        return KillingTensor.from_fn(lambda a, b: self[a, b] * c, self.tag)

    def plus(self, other: "KillingTensor", tag: str | None = None) -> "KillingTensor":
        return KillingTensor.from_fn(
            lambda a, b: self[a, b] + other[a, b], tag or self.tag
        )


def is_symmetric(mu: KillingTensor) -> bool:
    return all(
        (mu[a, b] - mu[b, a]).is_zero() for a in range(1, 4) for b in range(a + 1, 4)
    )


FAMILY_TAGS = tuple(f"family_{k}" for k in range(10))


def ckt_family(k: int, printed: bool = False) -> KillingTensor:
    """The k-th CKT family (k = 0..9) with generic symbolic parameters.

    ``printed=True`` selects the literal form of the two suspect families
    (6 and 7); for every other k it is identical to the default.
    """
    if k not in range(10):
        raise BadFamilySpec(f"family index {k} outside 0..9")
    d = lambda a, b: Scalar.constant(1 if a == b else 0)
    x = _X
    tag = f"family_{k}"

    if k == 0:
        phi = _fn("phi0")
        return KillingTensor.from_fn(lambda a, b: d(a, b) * phi, tag)

    if k == 1:
        lam = _sym_matrix("c1")
        lamt = _sym_matrix("c1t")
        phi = _fn("phi1")
        quad = sum(
            (lamt[(c, e)] * x[c] * x[e] for c in range(1, 4) for e in range(1, 4)),
            Scalar.constant(0),
        )
        trace = quad / _R2 * phi
        return KillingTensor.from_fn(lambda a, b: lam[(a, b)] + d(a, b) * trace, tag)

    if k == 2:
        vt = _vector("c2t")
        w = _vector("c2w")  # trace coefficient vector, independent of family 3
        phi = _fn("phi2")
        lin = sum((w[c] * x[c] for c in range(1, 4)), Scalar.constant(0))
        return KillingTensor.from_fn(
            lambda a, b: vt[a] * x[b] + vt[b] * x[a]
            - Scalar.constant(2) * d(a, b) * lin * phi,
            tag,
        )

    if k == 3:
        lam = _sym_matrix("c3")

        def m3(a, b):
            out = Scalar.constant(0)
            for cc in range(1, 4):
                for dd in range(1, 4):
                    e1 = _eps(a, cc, dd)
                    e2 = _eps(b, cc, dd)
                    if e1:
                        out = out + Scalar.constant(e1) * lam[(cc, b)] * x[dd]
                    if e2:
                        out = out + Scalar.constant(e2) * lam[(cc, a)] * x[dd]
            return out

        return KillingTensor.from_fn(m3, tag)

    if k == 4:
        v = _vector("c4")

        def m4(a, b):
            out = Scalar.constant(0)
            for cc in range(1, 4):
                for dd in range(1, 4):
                    e1 = _eps(b, cc, dd)
                    e2 = _eps(a, cc, dd)
                    if e1:
                        out = out + x[a] * Scalar.constant(e1) * x[cc] * v[dd]
                    if e2:
                        out = out + x[b] * Scalar.constant(e2) * x[cc] * v[dd]
            return out

        return KillingTensor.from_fn(m4, tag)

    if k == 5:
        phi = _fn("phi5")
        kc = S.param("c5")
        return KillingTensor.from_fn(
            lambda a, b: d(a, b) * _R2 * phi + kc * (x[a] * x[b] - d(a, b) * _R2),
            tag,
        )

    if k == 6:
        lam = _sym_matrix("c6")
        lamt = _sym_matrix("c6t")
        phi = _fn("phi6")
        quad = sum(
            (lamt[(c, e)] * x[c] * x[e] for c in range(1, 4) for e in range(1, 4)),
            Scalar.constant(0),
        )

        def m6(a, b):
            # second term: -(x^a lam^{bc} + x^b lam^{ac}) x^c, where the
            # literal (printed=True) variant replaces the first x^a by r^2
            first = _R2 if printed else x[a]
            out = lam[(a, b)] * _R2
            for cc in range(1, 4):
                out = out - (first * lam[(b, cc)] + x[b] * lam[(a, cc)]) * x[cc]
            return out + d(a, b) * quad * phi

        return KillingTensor.from_fn(m6, tag)

    if k == 7:
        v = _vector("c7")
        vbare = _vector("c7b") if printed else v  # unsubscripted vector as printed
        w = _vector("c7w")
        phi = _fn("phi7")
        lin7 = sum((v[c] * x[c] for c in range(1, 4)), Scalar.constant(0))
        linw = sum((w[c] * x[c] for c in range(1, 4)), Scalar.constant(0))
        return KillingTensor.from_fn(
            lambda a, b: (x[a] * v[b] + x[b] * vbare[a]) * _R2
            - Scalar.constant(4) * x[a] * x[b] * lin7
            + d(a, b) * linw * _R2 * phi,
            tag,
        )

    if k == 8:
        lam = _sym_matrix("c8")

        def m8(a, b):
            out = Scalar.constant(0)
            for cc in range(1, 4):
                for dd in range(1, 4):
                    e1 = _eps(b, cc, dd)
                    e2 = _eps(a, cc, dd)
                    if e1 or e2:
                        for nn in range(1, 4):
                            if e1:
                                out = out + Scalar.constant(2 * e1) * x[a] * lam[
                                    (dd, nn)
                                ] * x[cc] * x[nn]
                            if e2:
                                out = out + Scalar.constant(2 * e2) * x[b] * lam[
                                    (dd, nn)
                                ] * x[cc] * x[nn]
            for cc in range(1, 4):
                for kk in range(1, 4):
                    e1 = _eps(a, cc, kk)
                    e2 = _eps(b, cc, kk)
                    if e1:
                        out = out - Scalar.constant(e1) * lam[(b, kk)] * x[cc] * _R2
                    if e2:
                        out = out - Scalar.constant(e2) * lam[(a, kk)] * x[cc] * _R2
            return out

        return KillingTensor.from_fn(m8, tag)

    # k == 9
    lam = _sym_matrix("c9")
    lamt = _sym_matrix("c9t")
    phi = _fn("phi9")
    quad = sum(
        (lam[(c, e)] * x[c] * x[e] for c in range(1, 4) for e in range(1, 4)),
        Scalar.constant(0),
    )
    quadt = sum(
        (lamt[(c, e)] * x[c] * x[e] for c in range(1, 4) for e in range(1, 4)),
        Scalar.constant(0),
    )

    def m9(a, b):
        out = lam[(a, b)] * _R2 * _R2
        for cc in range(1, 4):
            out = out - Scalar.constant(2) * (
                x[a] * lam[(b, cc)] + x[b] * lam[(a, cc)]
            ) * x[cc] * _R2
        out = out + (Scalar.constant(4) * x[a] * x[b] + d(a, b) * _R2) * quad
        return out + d(a, b) * quadt * _R2 * phi

    return KillingTensor.from_fn(m9, tag)


def homogeneous_tensor(n: int, params: dict | None = None) -> KillingTensor:
    """Homogeneous polynomial CKT of degree n = 0, 1 or 2.

    Degree 0: constant symmetric matrix  lam^{ab}.
    Degree 1: lam^a x^b + lam^b x^a - 2 delta^{ab} lam^c x^c
              + mu^a x^b + mu^b x^a
              + (eps^{acd} lam^{cb} + eps^{bcd} lam^{ca}) x^d
              (the trace part shares its vector with the first symmetric
              part; the second symmetric part carries no trace term).
    Degree 2: kappa x^a x^b + (x^a eps^{bcd} + x^b eps^{acd}) lam^d x^c
              + delta^{ab} lamt^{cd} x^c x^d
              + lam^{ab} r^2 - (x^a lam^{bc} + x^b lam^{ac}) x^c.

    ``params`` may override any generated parameter by name with a Scalar.
    """
    if n not in (0, 1, 2):
        raise BadFamilySpec(f"homogeneous degree {n} outside 0..2")
    p = params or {}

    def par(name):
        v = p.get(name)
        return v if v is not None else S.param(name)

    d = lambda a, b: Scalar.constant(1 if a == b else 0)
    x = _X

    if n == 0:
        m = {
            (a, b): par(f"h0_{min(a,b)}{max(a,b)}")
            for a in range(1, 4)
            for b in range(1, 4)
        }
        return KillingTensor.from_fn(lambda a, b: m[(a, b)], "hom_0")

    if n == 1:
        lam = {a: par(f"h1l_{a}") for a in range(1, 4)}
        mu = {a: par(f"h1m_{a}") for a in range(1, 4)}
        lmat = {
            (a, b): par(f"h1s_{min(a,b)}{max(a,b)}")
            for a in range(1, 4)
            for b in range(1, 4)
        }
        lin = sum((lam[c] * x[c] for c in range(1, 4)), Scalar.constant(0))

        def m1(a, b):
            out = (
                lam[a] * x[b]
                + lam[b] * x[a]
                - Scalar.constant(2) * d(a, b) * lin
                + mu[a] * x[b]
                + mu[b] * x[a]
            )
            for cc in range(1, 4):
                for dd in range(1, 4):
                    e1 = _eps(a, cc, dd)
                    e2 = _eps(b, cc, dd)
                    if e1:
                        out = out + Scalar.constant(e1) * lmat[(cc, b)] * x[dd]
                    if e2:
                        out = out + Scalar.constant(e2) * lmat[(cc, a)] * x[dd]
            return out

        return KillingTensor.from_fn(m1, "hom_1")

    # n == 2
    kap = par("h2k")
    vec = {a: par(f"h2v_{a}") for a in range(1, 4)}
    tmat = {
        (a, b): par(f"h2t_{min(a,b)}{max(a,b)}")
        for a in range(1, 4)
        for b in range(1, 4)
    }
    lmat = {
        (a, b): par(f"h2s_{min(a,b)}{max(a,b)}")
        for a in range(1, 4)
        for b in range(1, 4)
    }
    quadt = sum(
        (tmat[(c, e)] * x[c] * x[e] for c in range(1, 4) for e in range(1, 4)),
        Scalar.constant(0),
    )

    def m2(a, b):
        out = kap * x[a] * x[b] + d(a, b) * quadt + lmat[(a, b)] * _R2
        for cc in range(1, 4):
            out = out - (x[a] * lmat[(b, cc)] + x[b] * lmat[(a, cc)]) * x[cc]
            for dd in range(1, 4):
                e1 = _eps(b, cc, dd)
                e2 = _eps(a, cc, dd)
                if e1:
                    out = out + x[a] * Scalar.constant(e1) * vec[dd] * x[cc]
                if e2:
                    out = out + x[b] * Scalar.constant(e2) * vec[dd] * x[cc]
        return out

    return KillingTensor.from_fn(m2, "hom_2")


def ckt_residual(mu: KillingTensor) -> dict:
    """Rank-3 residual of the traceless third-order condition.

    Returns {(a,b,c): Scalar} for 1 <= a <= b <= c <= 3 (the residual is
    totally symmetric by construction, so the upper triangle determines it).
    """
    sym = KillingTensor.from_fn(
        lambda a, b: (mu[a, b] + mu[b, a]) / Scalar.constant(2), mu.tag
    )
    dmu = {
        (a, b, c): sym[a, b].diff(c)
        for a in range(1, 4)
        for b in range(1, 4)
        for c in range(1, 4)
    }

    def combo(c):
        # mu^{nn}_c + 2 mu^{cn}_n
        out = Scalar.constant(0)
        for nn in range(1, 4):
            out = out + dmu[(nn, nn, c)] + Scalar.constant(2) * dmu[(c, nn, nn)]
        return out

    comb = {c: combo(c) for c in range(1, 4)}
    d = lambda a, b: 1 if a == b else 0
    res = {}
    for a in range(1, 4):
        for b in range(a, 4):
            for c in range(b, 4):
                lhs = Scalar.constant(5) * (
                    dmu[(a, b, c)] + dmu[(a, c, b)] + dmu[(b, c, a)]
                )
                rhs = Scalar.constant(0)
                if d(a, b):
                    rhs = rhs + comb[c]
                if d(b, c):
                    rhs = rhs + comb[a]
                if d(a, c):
                    rhs = rhs + comb[b]
                res[(a, b, c)] = lhs - rhs
    return res


def residual_is_zero(res: dict, constraints=None) -> bool:
    return all(v.is_zero(constraints) for v in res.values())
