"""Catalog of classified position-dependent-mass systems.

The catalog is a plain-text data file shipped with the package.  Each
entry records a mass profile ``f``, a potential ``V``, the claimed
second-order integrals of motion, the claimed first-order integrals, the
parameters and constraints they live under, and the expected
verification status.  This module parses, validates, formats, and builds
entries into concrete differential operators.

Entry block format::

    [entry T1.01]
    source      = table1 row1
    f           = rt^2 * F(theta)
    V           = G(phi) * F(theta) + R(theta)
    params      = c
    constraints = epsilon^2 = 1
    functions   = F(theta); G(phi)
    integrals   = L3^2 + {G(phi)}
    first_order = D
    expected    = PASS
    notes       = free text

Lines starting with ``#`` are comments.  A line beginning with
whitespace continues the previous value.  ``params``, ``constraints``,
``functions``, ``integrals`` and ``first_order`` are ``;``-separated
lists.  ``ordering`` is optional and selects how the kinetic term is
ordered: ``pfp`` (default; H = p_a f p_a + V) or ``symmetric``
(H = sqrt(f) p^2 sqrt(f) + V, realised as p_a f p_a + V - shift).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import diffop as DO
from . import grammar as G
from . import symexpr as S
from .symexpr import Scalar


class CatalogError(ValueError):
    """Malformed catalog data."""


class UndeclaredSymbol(CatalogError):
    """An entry uses a parameter or function it does not declare."""


FIRST_ORDER_NAMES = ("P1", "P2", "P3", "L1", "L2", "L3", "D", "K1", "K2", "K3")

_N_TOKENS = ("N1", "N2", "N3")

_KNOWN_KEYS = (
    "source", "f", "V", "ordering", "params", "constraints",
    "functions", "integrals", "first_order", "expected", "notes",
)
_REQUIRED_KEYS = ("source", "f", "V", "integrals", "expected")

_ENTRY_RE = re.compile(r"\[entry\s+([A-Za-z0-9_.]+)\]\s*$")
_KEYVAL_RE = re.compile(r"([A-Za-z_]+)\s*=\s*(.*)$")
_FUNC_DECL_RE = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)\(([a-z0-9]+)\)$")


@dataclass(frozen=True)
class CatalogEntry:
    """One classified system: mass profile, potential, claimed integrals."""

    entry_id: str
    source: str
    f: str
    potential: str
    ordering: str
    params: tuple
    constraints: tuple
    functions: tuple
    integrals: tuple
    first_order: tuple
    expected: str
    notes: str

    @property
    def uses_n_token(self) -> bool:
        return any(
            re.search(r"\bN[123]\b", q) is not None for q in self.integrals
        )


@dataclass(frozen=True)
class BuiltEntry:
    """Concrete operators for a catalog entry."""

    entry: CatalogEntry
    mass: Scalar
    potential: Scalar
    hamiltonian: dict
    integrals: tuple
    first_order: tuple  # tuple of (name, operator dict)
    constraints: S.Constraints


# ---------------------------------------------------------------------------
# parsing

def _split_list(value: str) -> tuple:
    parts = [p.strip() for p in value.split(";")]
    return tuple(p for p in parts if p)


def loads_catalog(text: str) -> tuple:
    """Parse catalog text into a tuple of validated CatalogEntry objects."""
    raw_entries = []
    current_id = None
    current_fields = None
    current_key = None
    header_line = 0

    def flush():
        if current_id is not None:
            raw_entries.append((current_id, current_fields, header_line))

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            current_key = None
            continue
        if stripped.startswith("#") and not line[:1].isspace():
            continue
        m = _ENTRY_RE.match(stripped)
        if m and not line[:1].isspace():
            flush()
            current_id = m.group(1)
            current_fields = {}
            current_key = None
            header_line = lineno
            continue
        if current_id is None:
            if stripped:
                raise CatalogError(f"line {lineno}: content outside any [entry] block")
            continue
        if line[:1].isspace():
            if not stripped:
                continue
            if current_key is None:
                raise CatalogError(f"line {lineno}: continuation line without a key")
            current_fields[current_key] = current_fields[current_key] + " " + stripped
            continue
        m = _KEYVAL_RE.match(stripped)
        if not m:
            raise CatalogError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, value = m.group(1), m.group(2).strip()
        if key not in _KNOWN_KEYS:
            raise CatalogError(f"line {lineno}: unknown key {key!r}")
        if key in current_fields:
            raise CatalogError(f"line {lineno}: duplicate key {key!r} in entry {current_id}")
        current_fields[key] = value
        current_key = key
    flush()

    entries = []
    seen = set()
    for entry_id, fields, lineno in raw_entries:
        if entry_id in seen:
            raise CatalogError(f"duplicate entry id {entry_id!r}")
        seen.add(entry_id)
        for key in _REQUIRED_KEYS:
            if key not in fields:
                raise CatalogError(f"entry {entry_id} (line {lineno}): missing key {key!r}")
        ordering = fields.get("ordering", "pfp")
        if ordering not in ("pfp", "symmetric"):
            raise CatalogError(f"entry {entry_id}: ordering must be 'pfp' or 'symmetric'")
        expected = fields["expected"]
        if expected not in ("PASS", "SUSPECT"):
            raise CatalogError(f"entry {entry_id}: expected must be PASS or SUSPECT")
        first_order = _split_list(fields.get("first_order", ""))
        for name in first_order:
            if name not in FIRST_ORDER_NAMES:
                raise CatalogError(
                    f"entry {entry_id}: unknown first-order integral {name!r}"
                )
        entry = CatalogEntry(
            entry_id=entry_id,
            source=fields["source"],
            f=fields["f"],
            potential=fields["V"],
            ordering=ordering,
            params=_split_list(fields.get("params", "")),
            constraints=_split_list(fields.get("constraints", "")),
            functions=_split_list(fields.get("functions", "")),
            integrals=_split_list(fields["integrals"]),
            first_order=first_order,
            expected=expected,
            notes=fields.get("notes", ""),
        )
        _validate_entry(entry)
        entries.append(entry)
    return tuple(entries)


def _declared_functions(entry: CatalogEntry) -> set:
    decls = set()
    for decl in entry.functions:
        m = _FUNC_DECL_RE.match(decl)
        if not m:
            raise CatalogError(
                f"entry {entry.entry_id}: function declaration {decl!r} "
                "must look like F(phi)"
            )
        decls.add((m.group(1), m.group(2)))
    return decls


def _check_vars(entry: CatalogEntry, scalar: Scalar, where: str,
                params: set, funcs: set) -> None:
    for key in scalar.free_vars():
        if key[0] == "p":
            if key[1] not in params:
                raise UndeclaredSymbol(
                    f"entry {entry.entry_id}: {where} uses undeclared "
                    f"parameter {key[1]!r}"
                )
        elif key[0] == "f":
            if (key[1], key[2]) not in funcs:
                raise UndeclaredSymbol(
                    f"entry {entry.entry_id}: {where} uses undeclared "
                    f"function {key[1]}({key[2]})"
                )
        elif key[0] == "j":
            raise CatalogError(
                f"entry {entry.entry_id}: {where} may not use jet symbols"
            )


def _validate_entry(entry: CatalogEntry) -> None:
    params = set(entry.params)
    funcs = _declared_functions(entry)
    try:
        f = G.parse_scalar(entry.f)
        V = G.parse_scalar(entry.potential)
    except G.ParseError as exc:
        raise CatalogError(f"entry {entry.entry_id}: {exc}") from exc
    _check_vars(entry, f, "f", params, funcs)
    _check_vars(entry, V, "V", params, funcs)
    for text in entry.constraints:
        try:
            key, rhs = G.parse_constraint(text)
        except G.ParseError as exc:
            raise CatalogError(f"entry {entry.entry_id}: {exc}") from exc
        if key[1] not in params:
            raise UndeclaredSymbol(
                f"entry {entry.entry_id}: constraint for undeclared "
                f"parameter {key[1]!r}"
            )
        _check_vars(entry, Scalar.from_poly(rhs), "constraint", params, funcs)
    # syntax-check integrals; N tokens are bound to placeholder atoms here
    dummy_n = {
        name: DO.conformal_generator("P" + name[1]) for name in _N_TOKENS
    }
    dummy_h = DO.hamiltonian(f, V)
    for q in entry.integrals:
        try:
            op = G.parse_operator(q, hamiltonian=dummy_h, extra=dummy_n)
        except G.ParseError as exc:
            raise CatalogError(f"entry {entry.entry_id}: integral {q!r}: {exc}") from exc
        for coeff in op.values():
            _check_vars(entry, coeff, f"integral {q!r}", params, funcs)


def load_catalog(path=None) -> tuple:
    """Load and validate the catalog (the shipped file by default)."""
    if path is None:
        text = (
            resources.files("pdmverify").joinpath("data/catalog.txt")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    return loads_catalog(text)


# ---------------------------------------------------------------------------
# formatting (round-trip support)

def format_entry(entry: CatalogEntry) -> str:
    lines = [f"[entry {entry.entry_id}]"]

    def put(key, value):
        if value:
            lines.append(f"{key} = {value}")

    put("source", entry.source)
    put("f", entry.f)
    put("V", entry.potential)
    if entry.ordering != "pfp":
        put("ordering", entry.ordering)
    put("params", "; ".join(entry.params))
    put("constraints", "; ".join(entry.constraints))
    put("functions", "; ".join(entry.functions))
    lines.append(f"integrals = {'; '.join(entry.integrals)}".rstrip())
    put("first_order", "; ".join(entry.first_order))
    put("expected", entry.expected)
    put("notes", entry.notes)
    return "\n".join(lines) + "\n"


def dumps_catalog(entries) -> str:
    return "\n".join(format_entry(e) for e in entries)


# ---------------------------------------------------------------------------
# building

def n_epsilon_candidates() -> tuple:
    """Candidate (alpha, beta) pairs for the family N_a = alpha P_a
    + beta eps K_a of first-order building blocks, deduplicated and in a
    deterministic order."""
    halves = (Fraction(1), Fraction(-1), Fraction(1, 2),
              Fraction(-1, 2), Fraction(2), Fraction(-2))
    out = []
    for alpha in halves:
        for beta in (Fraction(0),) + halves:
            pair = (alpha, beta)
            if pair not in out:
                out.append(pair)
    return tuple(out)


def _n_operators(alpha: Fraction, beta: Fraction, eps: Scalar) -> dict:
    ops = {}
    for a in (1, 2, 3):
        p = DO.conformal_generator(f"P{a}")
        k = DO.conformal_generator(f"K{a}")
        ops[f"N{a}"] = DO.op_add(
            DO.op_scale(p, Scalar.constant(alpha)),
            DO.op_scale(k, Fraction(beta) * eps),
        )
    return ops


def build_entry(entry: CatalogEntry, n_def=None, param_values=None) -> BuiltEntry:
    """Construct the Hamiltonian and integral operators for an entry.

    ``n_def`` is an (alpha, beta) pair binding the tokens N1..N3 to
    alpha P_a + beta eps K_a; required iff the entry uses those tokens.
    ``param_values`` maps parameter names to rational values substituted
    everywhere (e.g. {"epsilon": 1}).
    """
    images = {}
    if param_values:
        for name, value in param_values.items():
            img = value if isinstance(value, Scalar) else Scalar.constant(Fraction(value))
            images[S.param_key(name)] = img

    def prep(s: Scalar) -> Scalar:
        return s.substitute(images) if images else s

    f = prep(G.parse_scalar(entry.f))
    V = prep(G.parse_scalar(entry.potential))
    if entry.ordering == "symmetric":
        H = DO.hamiltonian(f, V - DO.ordering_shift(f))
    else:
        H = DO.hamiltonian(f, V)

    extra = None
    if entry.uses_n_token:
        if n_def is None:
            raise CatalogError(
                f"entry {entry.entry_id} uses N tokens; pass n_def=(alpha, beta)"
            )
        eps = prep(S.param("epsilon"))
        alpha, beta = n_def
        extra = _n_operators(Fraction(alpha), Fraction(beta), eps)

    integrals = []
    for q in entry.integrals:
        op = G.parse_operator(q, hamiltonian=H, extra=extra)
        if images:
            op = DO.op_map(op, lambda c: c.substitute(images))
        integrals.append(op)

    first = tuple(
        (name, DO.conformal_generator(name)) for name in entry.first_order
    )
    constraints = G.parse_constraints(entry.constraints)
    return BuiltEntry(
        entry=entry,
        mass=f,
        potential=V,
        hamiltonian=H,
        integrals=tuple(integrals),
        first_order=first,
        constraints=constraints,
    )
