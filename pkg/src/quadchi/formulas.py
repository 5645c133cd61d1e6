"""Closed quantifier-free formulas, sign conditions, and system files.

A *closed formula* is built from atoms ``p = 0``, ``p >= 0``, ``p <= 0``
with AND/OR only (no negation), so its realization is a closed set whenever
the atoms are closed.  Strict atoms (``> 0``, ``< 0``) exist for internal
sign-condition work but are rejected in user input.

The empty conjunction ``And(())`` is the formula ``true`` and the empty
disjunction ``Or(())`` is ``false``; the module exposes them as ``TRUE``
and ``FALSE``.

A :class:`System` bundles the quadratic block data: variables
``Y1..Yl, X1..Xk`` (``Y0`` only for already-homogenized families), the
family ``Q`` of polynomials quadratic in Y, the Y-free family ``P``, and a
closed defining formula whose atoms all come from ``Q`` and ``P``.  Systems
serialize to a simple sectioned text format::

    # optional comments
    vars: Y1 Y2 X1
    Q:
    Y1^2 + Y2^2 - 1
    P:
    X1 - 2
    formula:
    (Y1^2 + Y2^2 - 1 = 0 AND X1 - 2 <= 0)

Sign conditions come in three flavours used across the package: *strict*
(values in {-1, 0, 1}), *weak* (subsets {0}, {0,+1}, {0,-1}, encoded by
0/+1/-1), and *generalized* (values in {-2..2}, where +-1 push a polynomial
a fixed infinitesimal off zero and +-2 pin it at +-eps).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Mapping, Sequence, Union

from .polynomials import (
    Coeff,
    Polynomial,
    PolyParseError,
    constant,
    parse_polynomial,
)
from .scalars import qq

__all__ = [
    "Rel",
    "Atom",
    "And",
    "Or",
    "Formula",
    "TRUE",
    "FALSE",
    "FormulaParseError",
    "SystemError_",
    "System",
    "parse_formula",
    "parse_system",
    "atoms_of",
    "polys_of",
    "evaluate",
    "weak_evaluate",
    "is_closed",
    "map_polys",
    "conjuncts",
    "GENERALIZED_CODES",
    "membership_disjunct",
    "generalized_realization_formula",
]


class Rel(Enum):
    EQ = "= 0"
    GE = ">= 0"
    LE = "<= 0"
    GT = "> 0"
    LT = "< 0"

    @property
    def closed(self) -> bool:
        return self in (Rel.EQ, Rel.GE, Rel.LE)

    def holds(self, sign: int) -> bool:
        """Truth of ``p rel 0`` given the sign of ``p``."""
        if self is Rel.EQ:
            return sign == 0
        if self is Rel.GE:
            return sign >= 0
        if self is Rel.LE:
            return sign <= 0
        if self is Rel.GT:
            return sign > 0
        return sign < 0


@dataclass(frozen=True)
class Atom:
    poly: Polynomial
    rel: Rel


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


Formula = Union[Atom, And, Or]

TRUE = And(())
FALSE = Or(())


def atoms_of(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    else:
        for child in f.children:
            yield from atoms_of(child)


def polys_of(f: Formula) -> list[Polynomial]:
    """Distinct atom polynomials in first-appearance order."""
    seen = set()
    out = []
    for atom in atoms_of(f):
        k = atom.poly.key()
        if k not in seen:
            seen.add(k)
            out.append(atom.poly)
    return out


def is_closed(f: Formula) -> bool:
    return all(a.rel.closed for a in atoms_of(f))


def evaluate(f: Formula, signs: Mapping[tuple, int]) -> bool:
    """Truth under a strict sign assignment ``poly.key() -> {-1, 0, 1}``."""
    if isinstance(f, Atom):
        return f.rel.holds(signs[f.poly.key()])
    if isinstance(f, And):
        return all(evaluate(c, signs) for c in f.children)
    return any(evaluate(c, signs) for c in f.children)


def weak_evaluate(f: Formula, weak: Mapping[tuple, int]) -> bool:
    """Entailment of a closed formula by a weak sign condition.

    ``weak`` maps ``poly.key()`` to 0 (the condition ``p = 0``), +1
    (``p >= 0``) or -1 (``p <= 0``).  The result is True only if every
    point of the weak realization satisfies ``f``: atoms are credited
    exactly when the weak condition forces them, and AND/OR are monotone,
    so a True result is a sound entailment certificate — and for a point's
    own weak condition the evaluation equals the truth at that point.
    """
    if isinstance(f, Atom):
        w = weak[f.poly.key()]
        if f.rel is Rel.EQ:
            return w == 0
        if f.rel is Rel.GE:
            return w in (0, 1)
        if f.rel is Rel.LE:
            return w in (0, -1)
        raise ValueError("weak evaluation is defined for closed atoms only")
    if isinstance(f, And):
        return all(weak_evaluate(c, weak) for c in f.children)
    return any(weak_evaluate(c, weak) for c in f.children)


def map_polys(f: Formula, fn: Callable[[Polynomial], Polynomial]) -> Formula:
    if isinstance(f, Atom):
        return Atom(fn(f.poly), f.rel)
    if isinstance(f, And):
        return And(tuple(map_polys(c, fn) for c in f.children))
    return Or(tuple(map_polys(c, fn) for c in f.children))


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten nested conjunctions; a non-And formula is its own conjunct."""
    if isinstance(f, And):
        out: list[Formula] = []
        for c in f.children:
            out.extend(conjuncts(c))
        return out
    return [f]


class FormulaParseError(ValueError):
    """Raised on malformed formula text."""


class SystemError_(ValueError):
    """Raised when a system violates the block-structure contract."""


_REL_TOKENS = [(">=", Rel.GE), ("<=", Rel.LE), ("=", Rel.EQ)]


def _parse_atom(text: str, tower_size: int) -> Atom:
    for mark, rel in _REL_TOKENS:
        idx = text.find(mark)
        if idx >= 0:
            tail = text[idx + len(mark) :].strip()
            if tail != "0":
                raise FormulaParseError(
                    f"atom must compare against 0, got {tail!r}"
                )
            if (">" in text[:idx]) or ("<" in text[:idx]):
                raise FormulaParseError("strict atoms are not accepted in input")
            try:
                poly = parse_polynomial(text[:idx], tower_size)
            except PolyParseError as exc:
                raise FormulaParseError(str(exc)) from None
            return Atom(poly, rel)
    raise FormulaParseError(f"no relation in atom {text!r}")


def parse_formula(text: str, tower_size: int = 0) -> Formula:
    """Parse ``f := atom | (f AND f) | (f OR f) | true``.

    Atoms are ``<poly> (= 0 | >= 0 | <= 0)``; connectives are fully
    parenthesized and binary.  Strict relations are rejected.
    """
    text = text.strip()
    pos = 0
    n = len(text)

    def skip_ws(i: int) -> int:
        while i < n and text[i].isspace():
            i += 1
        return i

    def parse_f(i: int) -> tuple[Formula, int]:
        i = skip_ws(i)
        if i >= n:
            raise FormulaParseError("unexpected end of formula")
        if text[i] == "(":
            left, j = parse_f(i + 1)
            j = skip_ws(j)
            for word, cls in (("AND", And), ("OR", Or)):
                if text[j : j + len(word)] == word:
                    right, kx = parse_f(j + len(word))
                    kx = skip_ws(kx)
                    if kx >= n or text[kx] != ")":
                        raise FormulaParseError("missing ')'")
                    return cls((left, right)), kx + 1
            raise FormulaParseError("expected AND or OR")
        if text[i : i + 4] == "true" and (
            i + 4 == n or not text[i + 4].isalnum()
        ):
            return TRUE, i + 4
        # atom: runs to the next unbalanced ')' or an AND/OR keyword
        j = i
        depth = 0
        while j < n:
            ch = text[j]
            if ch == ")" and depth == 0:
                break
            if text[j : j + 5] == " AND " or text[j : j + 4] == " OR ":
                break
            j += 1
        return _parse_atom(text[i:j], tower_size), j

    f, end = parse_f(0)
    end = skip_ws(end)
    if end != n:
        raise FormulaParseError(f"trailing input {text[end:]!r}")
    return f


def _format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.poly} {f.rel.value}"
    if isinstance(f, And):
        if not f.children:
            return "true"
        parts = [_format_formula(c) for c in f.children]
        out = parts[0]
        for p in parts[1:]:
            out = f"({out} AND {p})"
        return out
    if not f.children:
        raise ValueError("the empty disjunction has no input syntax")
    parts = [_format_formula(c) for c in f.children]
    out = parts[0]
    for p in parts[1:]:
        out = f"({out} OR {p})"
    return out


@dataclass(frozen=True)
class System:
    """A block-structured semi-algebraic description.

    Attributes
    ----------
    ell, k : int
        Number of Y variables (quadratic block) and X variables.
    q_family, p_family : tuple of Polynomial
        Q: quadratic in Y (affine systems) or Y-homogeneous of degree 2
        (homogeneous systems, which mention ``Y0``); P: Y-free.
    formula : Formula
        Closed formula over ``q_family + p_family``.
    homogeneous : bool
        True when the Y block includes the homogenization variable ``Y0``.
    """

    ell: int
    k: int
    q_family: tuple[Polynomial, ...]
    p_family: tuple[Polynomial, ...]
    formula: Formula
    homogeneous: bool = False

    @property
    def m(self) -> int:
        return len(self.q_family)

    @property
    def s(self) -> int:
        return len(self.p_family)

    @property
    def d(self) -> int:
        """Max total X-degree over both families (0 when X never appears)."""
        degs = [p.degree_in_role("X") for p in self.q_family + self.p_family]
        return max([d for d in degs if d >= 0], default=0)

    def tower_size(self) -> int:
        return max(
            (p.tower_size() for p in self.q_family + self.p_family),
            default=0,
        )

    def y_vars(self) -> list[str]:
        lo = 0 if self.homogeneous else 1
        return [f"Y{i}" for i in range(lo, self.ell + 1)]

    def x_vars(self) -> list[str]:
        return [f"X{i}" for i in range(1, self.k + 1)]

    def validate(self) -> None:
        allowed = set(self.y_vars()) | set(self.x_vars())
        for p in self.q_family + self.p_family:
            bad = p.variables() - allowed
            if bad:
                raise SystemError_(f"variables {sorted(bad)} outside the declared blocks")
        for p in self.q_family:
            if self.homogeneous:
                if not p.is_zero() and any(
                    sum(e for v, e in mono if v[0] == "Y") != 2
                    for mono in p.terms
                ):
                    raise SystemError_(
                        f"Q member {p} is not Y-homogeneous of degree 2"
                    )
            elif p.degree_in_role("Y") > 2:
                raise SystemError_(f"Q member {p} has Y-degree > 2")
        for p in self.p_family:
            if any(v[0] == "Y" for v in p.variables()):
                raise SystemError_(f"P member {p} mentions Y variables")
        if not is_closed(self.formula):
            raise SystemError_("formula must use closed relations only")
        family_keys = {p.key() for p in self.q_family + self.p_family}
        for atom in atoms_of(self.formula):
            if atom.poly.key() not in family_keys:
                raise SystemError_(
                    f"formula atom {atom.poly} is not a member of Q or P"
                )

    def to_text(self) -> str:
        lines = [f"vars: {' '.join(self.y_vars() + self.x_vars())}"]
        if self.q_family:
            lines.append("Q:")
            lines.extend(str(p) for p in self.q_family)
        if self.p_family:
            lines.append("P:")
            lines.extend(str(p) for p in self.p_family)
        lines.append("formula:")
        lines.append(_format_formula(self.formula))
        return "\n".join(lines) + "\n"


def parse_system(text: str) -> System:
    """Parse the sectioned system format (see module docstring).

    Raises :class:`FormulaParseError`, :class:`PolyParseError` (wrapped),
    or :class:`SystemError_` on malformed input; the returned system is
    validated.
    """
    sections: dict[str, list[str]] = {}
    current: str | None = None
    vars_line: str | None = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lowered = line.lower()
        if lowered.startswith("vars:"):
            if vars_line is not None:
                raise SystemError_("duplicate vars section")
            vars_line = line[5:].strip()
            current = None
        elif lowered in ("q:", "p:", "formula:"):
            current = lowered[:-1]
            if current in sections:
                raise SystemError_(f"duplicate section {current!r}")
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
        else:
            raise SystemError_(f"content outside any section: {line!r}")
    if vars_line is None:
        raise SystemError_("missing vars section")
    names = vars_line.split()
    y_idx = sorted(int(v[1:]) for v in names if v[0] == "Y")
    x_idx = sorted(int(v[1:]) for v in names if v[0] == "X")
    if len(set(names)) != len(names):
        raise SystemError_("duplicate variable in vars line")
    if any(v[0] not in "YX" for v in names):
        raise SystemError_("vars may list only Y and X variables")
    homogeneous = bool(y_idx) and y_idx[0] == 0
    ell = max(y_idx) if y_idx else 0
    k = max(x_idx) if x_idx else 0
    expect_y = list(range(0 if homogeneous else 1, ell + 1))
    if y_idx != expect_y or x_idx != list(range(1, k + 1)):
        raise SystemError_("variable indices must be contiguous")

    # two passes so every polynomial shares the widest tower
    def parse_all(tsize: int) -> tuple[list[Polynomial], list[Polynomial]]:
        try:
            qs = [parse_polynomial(t, tsize) for t in sections.get("q", [])]
            ps = [parse_polynomial(t, tsize) for t in sections.get("p", [])]
        except PolyParseError as exc:
            raise FormulaParseError(str(exc)) from None
        return qs, ps

    q_family, p_family = parse_all(0)
    tsize = max((p.tower_size() for p in q_family + p_family), default=0)
    if "formula" not in sections or not sections["formula"]:
        raise SystemError_("missing formula section")
    formula = parse_formula(" ".join(sections["formula"]), tsize)
    tsize = max(
        tsize, max((p.tower_size() for p in polys_of(formula)), default=0)
    )
    if tsize:
        q_family, p_family = parse_all(tsize)
        formula = parse_formula(" ".join(sections["formula"]), tsize)
    system = System(
        ell=ell,
        k=k,
        q_family=tuple(q_family),
        p_family=tuple(p_family),
        formula=formula,
        homogeneous=homogeneous,
    )
    system.validate()
    return system


# ---------------------------------------------------------------------------
# Generalized sign-condition realizations.
# ---------------------------------------------------------------------------

GENERALIZED_CODES = (-2, -1, 0, 1, 2)


def _distinct_family_keys(system: System) -> list[tuple]:
    keys = [p.key() for p in system.q_family + system.p_family]
    if len(set(keys)) != len(keys):
        raise SystemError_(
            "generalized sign conditions require pairwise distinct "
            "polynomials across the two families"
        )
    return keys


def membership_disjunct(system: System, rho: Sequence[int]) -> Formula:
    """The part-of-the-set condition attached to a generalized sign code.

    A code ``rho`` pins each quadratic-family member to one of the five
    generalized signs; the remaining freedom lies on the parameter side.
    This returns the disjunction, over every weak sign vector on the
    parameter-side family that together with ``rho`` entails the system's
    formula, of that vector's defining conjunction.  The result collapses
    to ``true`` when every vector qualifies (no parameter-side constraint
    is needed) and to ``false`` when none does (the code contributes an
    empty set).

    Entailment is the syntactic one of :func:`weak_evaluate`; for the
    negation-free closed formulas systems carry, it coincides with the
    semantic statement "the whole weak realization lies inside the set".
    """
    _distinct_family_keys(system)
    if len(rho) != system.m:
        raise ValueError(f"code has length {len(rho)}, family has {system.m}")
    weak: dict[tuple, int] = {}
    for q, code in zip(system.q_family, rho):
        if code not in GENERALIZED_CODES:
            raise ValueError(f"invalid generalized sign {code}")
        weak[q.key()] = 0 if code == 0 else (1 if code > 0 else -1)
    rel_of = {0: Rel.EQ, 1: Rel.GE, -1: Rel.LE}
    accepted: list[Formula] = []
    vectors = list(_weak_vectors(system.s))
    for tau in vectors:
        for p, w in zip(system.p_family, tau):
            weak[p.key()] = w
        if weak_evaluate(system.formula, weak):
            accepted.append(
                And(tuple(Atom(p, rel_of[w]) for p, w in zip(system.p_family, tau)))
            )
    if len(accepted) == len(vectors):
        return TRUE
    return Or(tuple(accepted))


def _weak_vectors(s: int) -> Iterator[tuple[int, ...]]:
    if s == 0:
        yield ()
        return
    for head in (0, 1, -1):
        for tail in _weak_vectors(s - 1):
            yield (head,) + tail


def generalized_realization_formula(
    rho: Sequence[int],
    system: System,
    eps: Sequence[Coeff],
) -> Formula:
    """The closed formula carving out a generalized sign condition.

    Each quadratic-family member ``Q_i`` is constrained according to its
    code ``rho[i]`` at the deformation scale ``eps[i]``::

         0   Q_i  = 0
        +1   Q_i >= eps[i]          -1   Q_i <= -eps[i]
        +2   Q_i  = eps[i]          -2   Q_i  = -eps[i]

    and the conjunction is completed by :func:`membership_disjunct`, the
    condition that the code stays inside the system's set.  The scales may
    be symbolic infinitesimals or concrete rationals; the formula is exact
    either way.

    Parameters
    ----------
    rho:
        One code from ``GENERALIZED_CODES`` per quadratic-family member.
    system:
        The block-structured system whose set is being stratified.
    eps:
        One positive deformation scale per member, matching ``rho``.
    """
    if len(eps) != len(rho):
        raise ValueError("one deformation scale per code is required")
    disjunct = membership_disjunct(system, rho)
    atoms: list[Formula] = []
    for q, code, e in zip(system.q_family, rho, eps):
        scale = constant(e)
        if code == 0:
            atoms.append(Atom(q, Rel.EQ))
        elif code == 1:
            atoms.append(Atom(q - scale, Rel.GE))
        elif code == -1:
            atoms.append(Atom(q + scale, Rel.LE))
        elif code == 2:
            atoms.append(Atom(q - scale, Rel.EQ))
        else:
            atoms.append(Atom(q + scale, Rel.EQ))
    return And(tuple(atoms) + (disjunct,))
