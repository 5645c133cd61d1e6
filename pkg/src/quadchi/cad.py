"""Cylindrical algebraic decomposition with exact cell arithmetic.

Given polynomials ``F`` in ordered variables ``v_1, ..., v_n``, a
*cylindrical algebraic decomposition* adapted to ``F`` partitions real
``n``-space into finitely many cells — points and open intervals stacked
cylindrically over the cells of an ``(n-1)``-dimensional decomposition —
such that every member of ``F`` has constant sign on every cell.  The last
listed variable is eliminated first; lifting proceeds in listed order.

Projection is the classical coefficient/subresultant operator: for each
basis polynomial, the leading coefficients of its chain of reducta and the
principal subresultant coefficients of each reductum against its
derivative; for each pair of distinct basis polynomials, the principal
subresultant coefficients of the reducta of one against the other.  Basis
polynomials are made primitive (polynomial content split off and projected
separately) and squarefree in the eliminated variable, both via an exact
multivariate gcd, so the sign-invariance of the projection on lower cells
guarantees delineability of root functions above them.

Each full-dimensional stack is materialized with exact sample points
(:mod:`quadchi.algebraic`), one per cell: rational samples inside sectors,
algebraic or rational samples on sections.  A cell of dimension ``d``
(``d`` = number of interval coordinates in its cylinder index) is an open
``d``-cell, so its Borel-Moore Euler characteristic is ``(-1)**d``; the
table of these values per sign condition is the bridge from decompositions
to Euler-characteristic computations, and over all cells they sum to
``(-1)**n``, the Borel-Moore characteristic of real ``n``-space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .algebraic import SamplePoint, isolate_over
from .formulas import And, Atom, Formula, Rel, evaluate, polys_of
from .polynomials import (
    Polynomial,
    constant,
    poly_derivative,
    poly_exact_div,
    principal_subres_coeffs,
    strip_rational_content,
    subresultant_prs,
    univar_coeffs,
    variable,
)
from .scalars import qq

__all__ = [
    "Cell",
    "Decomposition",
    "CadError",
    "cylindrical_decomposition",
    "poly_gcd",
    "content_in",
    "squarefree_part_in",
]


class CadError(Exception):
    """Invalid input to the decomposition (variables, coefficients, order)."""


# ---------------------------------------------------------------------------
# Exact multivariate gcd, contents, squarefree parts.
# ---------------------------------------------------------------------------


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """A greatest common divisor of two rational-coefficient polynomials,
    normalized up to a positive rational scalar.

    Recursive primitive-remainder computation: pick a main variable, split
    off the contents (gcds of the coefficient lists, one variable fewer),
    and take the primitive part of the last nonzero subresultant of the
    primitive parts.
    """
    a = strip_rational_content(a)
    b = strip_rational_content(b)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.is_constant() or b.is_constant():
        return constant(1)
    avars, bvars = a.variables(), b.variables()
    v = sorted(avars | bvars)[-1]
    if v not in avars:
        return poly_gcd(content_in(b, v), a)
    if v not in bvars:
        return poly_gcd(content_in(a, v), b)
    ca, cb = content_in(a, v), content_in(b, v)
    cont = poly_gcd(ca, cb)
    pa, pb = poly_exact_div(a, ca), poly_exact_div(b, cb)
    last = subresultant_prs(pa, pb, v)[-1]
    if last.degree(v) <= 0:
        g = constant(1)
    else:
        g = poly_exact_div(last, content_in(last, v))
    return strip_rational_content(cont * g)


def content_in(f: Polynomial, var: str) -> Polynomial:
    """Gcd of the coefficients of ``f`` viewed as univariate in ``var``."""
    out = Polynomial.zero()
    for c in univar_coeffs(f, var):
        if not c.is_zero():
            out = poly_gcd(out, c)
            if out.is_constant():
                return constant(1)
    return out if not out.is_zero() else constant(1)


def squarefree_part_in(f: Polynomial, var: str) -> Polynomial:
    """``f`` divided by ``gcd(f, df/d var)`` — same zero set, simple roots."""
    d = poly_derivative(f, var)
    if d.is_zero():
        return f
    g = poly_gcd(f, d)
    if g.is_constant():
        return f
    return poly_exact_div(f, g)


def _canonical(p: Polynomial) -> Polynomial:
    p = strip_rational_content(p)
    if p.leading_sign() < 0:
        p = -p
    return p


# ---------------------------------------------------------------------------
# Projection.
# ---------------------------------------------------------------------------


def _reducta(f: Polynomial, var: str) -> list[Polynomial]:
    out = []
    red = f
    while red.degree(var) >= 1 and var in red.variables():
        out.append(red)
        d = red.degree(var)
        lc = red.coefficient(var, d)
        if lc.is_constant():
            # The degree can never drop below this reductum, so the chain
            # (which only exists to cover vanishing leading coefficients)
            # stops here.
            return out
        red = red - lc * variable(var) ** d
    if not red.is_zero():
        out.append(red)
    return out


def _project(basis: Sequence[Polynomial], var: str) -> list[Polynomial]:
    """Coefficient and subresultant projection of a basis in ``var``."""
    out: list[Polynomial] = []
    for f in basis:
        for red in _reducta(f, var):
            d = red.degree(var) if var in red.variables() else 0
            if d == 0:
                out.append(red)
                continue
            out.append(red.coefficient(var, d))
            if d >= 2:
                out.extend(principal_subres_coeffs(red, poly_derivative(red, var), var))
    for i, f in enumerate(basis):
        for g in basis[i + 1 :]:
            for red in _reducta(f, var):
                if var in red.variables() and red.degree(var) >= 1:
                    out.extend(principal_subres_coeffs(red, g, var))
    return [p for p in out if not p.is_constant()]


def _level_sets(
    polys: Sequence[Polynomial], var_order: Sequence[str]
) -> dict[str, list[Polynomial]]:
    """Split polynomials into per-level squarefree primitive bases and close
    under projection, eliminating the last listed variable first."""
    pool = [strip_rational_content(p) for p in polys if not p.is_constant()]
    levels: dict[str, list[Polynomial]] = {}
    for v in reversed(list(var_order)):
        here = [p for p in pool if v in p.variables()]
        pool = [p for p in pool if v not in p.variables()]
        basis: list[Polynomial] = []
        seen: set[tuple] = set()
        for p in here:
            cont = content_in(p, v)
            if not cont.is_constant():
                pool.append(cont)
                p = poly_exact_div(p, cont)
            p = _canonical(squarefree_part_in(p, v))
            if p.is_constant():
                continue
            if p.key() not in seen:
                seen.add(p.key())
                basis.append(p)
        levels[v] = basis
        pool.extend(_project(basis, v))
    leftover = [p for p in pool if not p.is_constant()]
    if leftover:
        raise CadError(
            f"polynomials mention variables outside the order: {[str(p) for p in leftover]}"
        )
    return levels


# ---------------------------------------------------------------------------
# Cells and lifting.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    """One cell of a decomposition.

    ``index`` is the cylinder position per level: the ``j``-th section of a
    stack has entry ``2j`` (1-based roots), the sectors around them odd
    entries ``2j+1``.  ``dimension`` counts the sector coordinates; the
    cell is an open cell of that dimension, so its Borel-Moore Euler
    characteristic is ``(-1)**dimension``.  ``signs`` lists the sign of
    every input polynomial at ``sample`` in input order.
    """

    index: tuple[int, ...]
    dimension: int
    sample: SamplePoint
    signs: tuple[int, ...]

    @property
    def level(self) -> int:
        return len(self.index)

    def chi_bm(self) -> int:
        return -1 if self.dimension % 2 else 1


@dataclass(frozen=True)
class Decomposition:
    """A full decomposition: cells, the inputs they are adapted to, and any
    warnings raised while normalizing the inputs."""

    var_order: tuple[str, ...]
    input_polys: tuple[Polynomial, ...]
    cells: tuple[Cell, ...]
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def chi_bm_total(self) -> int:
        """Sum of ``(-1)**dim`` over all cells; always ``(-1)**n``."""
        return sum(c.chi_bm() for c in self.cells)

    def chi_bm_table(self) -> dict[tuple[int, ...], int]:
        """Borel-Moore Euler characteristic per realizable sign condition."""
        out: dict[tuple[int, ...], int] = {}
        for c in self.cells:
            out[c.signs] = out.get(c.signs, 0) + c.chi_bm()
        return out

    def realizable_sign_conditions(self) -> set[tuple[int, ...]]:
        return {c.signs for c in self.cells}

    def chi_bm_where(self, predicate: Callable[[tuple[int, ...]], bool]) -> int:
        """Sum of cell characteristics over sign vectors the predicate accepts."""
        return sum(c.chi_bm() for c in self.cells if predicate(c.signs))

    def chi_bm_of_formula(self, formula: Formula) -> int:
        """Borel-Moore characteristic of the set a formula defines.

        Every polynomial of the formula must be one of the input
        polynomials (compared exactly), so truth is decided by the stored
        sign vectors.
        """
        index: dict[tuple, int] = {p.key(): i for i, p in enumerate(self.input_polys)}
        needed = polys_of(formula)
        missing = [str(p) for p in needed if p.key() not in index]
        if missing:
            raise CadError(f"formula polynomials not in the decomposition: {missing}")

        def satisfied(signs: tuple[int, ...]) -> bool:
            assignment = {k: signs[i] for k, i in index.items()}
            return evaluate(formula, assignment)

        return self.chi_bm_where(satisfied)


def _certainly_false(f: Formula, decided: dict[tuple, int]) -> bool:
    """Whether the formula is false under every completion of the decided
    polynomial signs (undecided atoms count as possibly true)."""
    if isinstance(f, Atom):
        s = decided.get(f.poly.key())
        if s is None:
            return False
        if f.rel is Rel.LE:
            return s > 0
        if f.rel is Rel.GE:
            return s < 0
        if f.rel is Rel.LT:
            return s >= 0
        if f.rel is Rel.GT:
            return s <= 0
        return s != 0
    if isinstance(f, And):
        return any(_certainly_false(c, decided) for c in f.children)
    return all(_certainly_false(c, decided) for c in f.children)


def cylindrical_decomposition(
    polys: Sequence[Polynomial],
    var_order: Sequence[str],
    *,
    gate: Formula | None = None,
) -> Decomposition:
    """Decompose real space adapted to ``polys`` under ``var_order``.

    Parameters
    ----------
    polys:
        Polynomials with rational coefficients in the listed variables.
        Identically zero members are dropped with a warning; their sign
        slot is 0 on every cell.
    var_order:
        Distinct variables; the space decomposed is their product space
        (``[]`` gives the one-point decomposition of 0-space).  The last
        variable is eliminated first during projection.
    gate:
        Optional formula over the same variables.  Stacks are pruned as
        soon as the signs decided along the lifted prefix already falsify
        it, and the returned cells are exactly the cells satisfying it.
        Sums over all cells (``chi_bm_total``) then describe the gate's
        realization rather than the whole space; per-sign-condition
        queries restricted to the gate are unaffected.

    Returns
    -------
    Decomposition
        All cells, each with an exact sample point and the input signs.

    Examples
    --------
    >>> from quadchi.polynomials import parse_polynomial
    >>> d = cylindrical_decomposition(
    ...     [parse_polynomial("Y1^2 + Y2^2 - 1")], ["Y1", "Y2"]
    ... )
    >>> len(d.cells), d.chi_bm_total()
    (13, 1)
    """
    order = tuple(var_order)
    if len(set(order)) != len(order):
        raise CadError("variable order contains repeats")
    warnings: list[str] = []
    kept: list[Polynomial] = []
    zero_slots: set[int] = set()
    for i, p in enumerate(polys):
        if p.has_tower_coeffs():
            raise CadError(
                "decomposition requires rational coefficients; "
                "instantiate infinitesimals first"
            )
        if p.is_zero():
            zero_slots.add(i)
            warnings.append(f"input polynomial #{i} is identically zero; sign forced to 0")
            continue
        bad = p.variables() - set(order)
        if bad:
            raise CadError(f"polynomial mentions variables outside the order: {sorted(bad)}")
        kept.append(p)
    levels = _level_sets(kept, order)
    decided_at: dict[str, list[Polynomial]] = {v: [] for v in order}
    initial: dict[tuple, int] = {}
    if gate is not None:
        gate_polys = {p.key(): p for p in polys_of(gate)}
        prefix: set[str] = set()
        placed: set[tuple] = set()
        for key, p in gate_polys.items():
            if not p.variables():
                initial[key] = p.leading_sign()
                placed.add(key)
        for v in order:
            prefix.add(v)
            for key, p in gate_polys.items():
                if key not in placed and p.variables() <= prefix:
                    decided_at[v].append(p)
                    placed.add(key)
        if len(placed) != len(gate_polys):
            raise CadError("gate mentions variables outside the order")
    frontier: list[tuple[tuple[int, ...], SamplePoint, dict[tuple, int]]] = []
    if gate is None or not _certainly_false(gate, initial):
        frontier.append(((), SamplePoint.origin(), initial))
    for v in order:
        fam = levels[v]
        fresh = decided_at[v]
        new_frontier: list[tuple[tuple[int, ...], SamplePoint, dict[tuple, int]]] = []
        for idx, pt, known in frontier:
            fibre = isolate_over(pt, fam, v)
            extensions = [(idx + (1,), pt.extend_rational(v, fibre.gaps[0]))]
            for j, root in enumerate(fibre.roots):
                extensions.append((idx + (2 * j + 2,), pt.extend_root(v, root)))
                extensions.append(
                    (idx + (2 * j + 3,), pt.extend_rational(v, fibre.gaps[j + 1]))
                )
            for eidx, ept in extensions:
                if fresh:
                    ext_known = dict(known)
                    for p in fresh:
                        ext_known[p.key()] = ept.sign(p)
                    if _certainly_false(gate, ext_known):
                        continue
                else:
                    ext_known = known
                new_frontier.append((eidx, ept, ext_known))
        frontier = new_frontier
    cells = []
    for idx, pt, _ in frontier:
        dim = sum(1 for k in idx if k % 2 == 1)
        signs: list[int] = []
        kept_iter = iter(kept)
        for i in range(len(polys)):
            signs.append(0 if i in zero_slots else pt.sign(next(kept_iter)))
        cells.append(Cell(index=idx, dimension=dim, sample=pt, signs=tuple(signs)))
    return Decomposition(
        var_order=order,
        input_polys=tuple(polys),
        cells=tuple(cells),
        warnings=tuple(warnings),
    )
