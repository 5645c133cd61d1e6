"""Exact arithmetic at real algebraic sample points.

A sample point is a chain of coordinate assignments ``v_1 = c_1, ...,
v_r = c_r`` where each ``c_i`` is either a rational or a real algebraic
number given by a *defining pair*: a polynomial ``D_i`` in the algebraic
predecessor variables and ``v_i`` (rational coordinates are substituted
away at construction time) together with an open isolating interval
``(lo_i, hi_i)`` that contains exactly one root of the specialized
``D_i``, that root simple, and whose endpoints are not roots.  The
leading coefficient of ``D_i`` in ``v_i`` does not vanish at the
predecessor point.

Two primitives drive everything built on top:

``SamplePoint.sign(p)``
    The exact sign of a polynomial at the point.  Rational coordinates are
    substituted; at the topmost algebraic coordinate ``alpha`` (the unique
    simple root of ``D`` in ``(lo, hi)``) the sign of ``p`` is a counting
    problem: for a signed pseudo-remainder sequence of ``(D, D' * p)`` the
    difference of sign-variation counts at ``lo`` and ``hi`` equals the sum
    of ``sign(p)`` over the roots of ``D`` in the interval — here a single
    summand, ``sign(p(alpha))``.  An interval-arithmetic enclosure is tried
    first; the exact query runs only when the enclosure straddles zero.

``isolate_over(point, polys, var)``
    The ordered real roots, over the point, of a family of polynomials in
    one additional variable: per-polynomial isolation by variation-count
    bisection, multiple roots resolved by descending the chain of
    derivative gcds until a defining polynomial with a simple root is
    found, then cross-polynomial merging by exact sign tests and interval
    refinement.  The result lists the sections (each with the subset of
    the family vanishing there) and a rational sample value inside every
    gap between consecutive sections.

Soundness of the remainder sequences rests on two facts.  First, every
pseudo-remainder step scales by an even power of a leading coefficient
that is nonzero at the point, plus a positive rational content rescale —
both positive at the point, so evaluated sign variations are those of a
genuine signed remainder sequence.  Second, terms divisible by a
*predecessor* defining polynomial vanish at the point, so reduction by
predecessor defining polynomials (and dropping leading coefficients that
vanish at the predecessor point) never changes evaluated signs; reduction
by the *own* defining polynomial is applied only to the second sequence
element, where it changes the represented rational function by a
polynomial and therefore no Cauchy-index pole contributions.  Coefficient
signs at lower levels are decided by recursion into the parent point, and
every answered query is cached on the node that answered it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import univariate as uv
from .polynomials import (
    Polynomial,
    constant,
    from_univar_coeffs,
    poly_derivative,
    poly_prem,
    strip_rational_content,
    univar_coeffs,
)
from .scalars import QQ, qq, qq_sign

__all__ = ["SamplePoint", "RootOverPoint", "LiftFibre", "isolate_over"]

# Bisection tripwire.  Every refinement loop below runs only after the
# dichotomy it resolves has been decided exactly (a sign or gcd test), so
# termination is guaranteed; the budget only converts a hypothetical bug
# into an error instead of a hang.  It must dominate the worst root gap of
# the inputs: projection cascades over polynomials whose coefficients span
# hundreds of bits produce gaps far below 2**-256, hence the generous size.
_MAX_REFINE = 8192
_CHEAP_ROUNDS = 3
# Bisection rounds spent trying to pull two overlapping candidate roots
# apart before paying for an exact equality test.  Distinct roots of the
# squarefree fibre polynomials usually separate well within this budget.
_QUICK_SEPARATE = 24


class AlgebraicPointError(Exception):
    """An internal invariant of the sample-point machinery failed."""


# ---------------------------------------------------------------------------
# Interval helpers (closed rational intervals).
# ---------------------------------------------------------------------------


def _iv_mul(a: tuple[QQ, QQ], b: tuple[QQ, QQ]) -> tuple[QQ, QQ]:
    cands = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(cands), max(cands))


def _iv_pow(a: tuple[QQ, QQ], e: int) -> tuple[QQ, QQ]:
    lo, hi = a
    if e == 1:
        return a
    if lo >= 0:
        return (lo**e, hi**e)
    if hi <= 0:
        return (hi**e, lo**e) if e % 2 == 0 else (lo**e, hi**e)
    if e % 2 == 0:
        return (qq(0), max(-lo, hi) ** e)
    return (lo**e, hi**e)


# ---------------------------------------------------------------------------
# Coordinates.
# ---------------------------------------------------------------------------


class _Box:
    """Mutable enclosure of one algebraic coordinate.

    ``exact`` is set when a bisection midpoint turns out to be the root
    itself; from then on the coordinate behaves like a rational one.
    ``s_lo`` is the (fixed, nonzero) sign of the defining polynomial at the
    lower endpoint, used to pick the half containing the root.
    """

    __slots__ = ("lo", "hi", "exact", "s_lo")

    def __init__(self, lo: QQ, hi: QQ, s_lo: int) -> None:
        self.lo = lo
        self.hi = hi
        self.exact: QQ | None = None
        self.s_lo = s_lo


@dataclass(frozen=True)
class RationalCoord:
    value: QQ


class AlgebraicCoord:
    __slots__ = ("defpoly", "box")

    def __init__(self, defpoly: Polynomial, box: _Box) -> None:
        self.defpoly = defpoly
        self.box = box


# ---------------------------------------------------------------------------
# Sample points.
# ---------------------------------------------------------------------------


class SamplePoint:
    """A point of real space with rational or real algebraic coordinates.

    Points form an immutable chain: each node adds one coordinate on top of
    its parent.  Use :meth:`origin` for the empty point, then
    :meth:`extend_rational` / :meth:`extend_root`.  Enclosure refinement
    mutates only the (private) interval boxes, never the chain.

    Examples
    --------
    >>> from quadchi.polynomials import parse_polynomial
    >>> pt = SamplePoint.origin()
    >>> fibre = isolate_over(pt, [parse_polynomial("Y1^2 - 2")], "Y1")
    >>> len(fibre.roots)
    2
    >>> r2 = pt.extend_root("Y1", fibre.roots[1])
    >>> r2.sign(parse_polynomial("Y1^3 - 2*Y1"))
    0
    >>> r2.sign(parse_polynomial("2*Y1 - 3"))
    -1
    """

    __slots__ = ("parent", "var", "coord", "_signs")

    def __init__(
        self,
        parent: "SamplePoint | None",
        var: str | None,
        coord: "RationalCoord | AlgebraicCoord | None",
    ) -> None:
        self.parent = parent
        self.var = var
        self.coord = coord
        self._signs: dict[tuple, int] = {}

    # -- construction -------------------------------------------------------

    @staticmethod
    def origin() -> "SamplePoint":
        return SamplePoint(None, None, None)

    def level(self) -> int:
        n, node = 0, self
        while node.parent is not None:
            n += 1
            node = node.parent
        return n

    def var_chain(self) -> list[str]:
        out: list[str] = []
        node = self
        while node.parent is not None:
            out.append(node.var)  # type: ignore[arg-type]
            node = node.parent
        out.reverse()
        return out

    def _check_new_var(self, var: str) -> None:
        if var in self.var_chain():
            raise ValueError(f"variable {var} already has a coordinate")

    def extend_rational(self, var: str, value) -> "SamplePoint":
        self._check_new_var(var)
        return SamplePoint(self, var, RationalCoord(qq(value)))

    def extend_algebraic(
        self,
        var: str,
        defpoly: Polynomial,
        lo,
        hi,
        s_lo: int | None = None,
    ) -> "SamplePoint":
        """Extend by the unique simple root of ``defpoly`` in ``(lo, hi)``.

        The defining polynomial must mention only ``var`` and algebraic
        coordinates of this point, carry rational coefficients, and have a
        leading coefficient (in ``var``) that does not vanish here; the
        endpoint signs must be nonzero and opposite.
        """
        self._check_new_var(var)
        lo, hi = qq(lo), qq(hi)
        if not lo < hi:
            raise ValueError("empty isolating interval")
        a = self._psign(defpoly.substitute({var: lo}))
        b = self._psign(defpoly.substitute({var: hi}))
        if s_lo is None:
            s_lo = a
        if a == 0 or a != s_lo or a * b != -1:
            raise AlgebraicPointError("isolating interval endpoints must bracket a sign change")
        return SamplePoint(self, var, AlgebraicCoord(defpoly, _Box(lo, hi, s_lo)))

    def extend_root(self, var: str, root: "RootOverPoint") -> "SamplePoint":
        if root.value is not None:
            return self.extend_rational(var, root.value)
        assert root.defpoly is not None
        return self.extend_algebraic(var, root.defpoly, root.lo, root.hi, root.s_lo)

    # -- evaluation ---------------------------------------------------------

    def sign(self, p: Polynomial) -> int:
        """Exact sign of ``p`` at this point."""
        if p.has_tower_coeffs():
            raise ValueError("cannot evaluate infinitesimal coefficients at a sample point")
        return self._psign(p.substitute(self._rational_assignment()))

    def approx(self, width=qq(1, 2**24)) -> list[QQ]:
        """Rational approximations of the coordinates, enclosures refined
        below ``width``; exact values where known."""
        out: list[QQ] = []
        node = self
        while node.parent is not None:
            c = node.coord
            if isinstance(c, RationalCoord):
                out.append(c.value)
            else:
                assert isinstance(c, AlgebraicCoord)
                guard = 0
                while c.box.exact is None and c.box.hi - c.box.lo > width:
                    node._refine_once()
                    guard += 1
                    if guard > 4 * _MAX_REFINE:
                        raise AlgebraicPointError("refinement failed to converge")
                out.append(c.box.exact if c.box.exact is not None else (c.box.lo + c.box.hi) * qq(1, 2))
            node = node.parent
        out.reverse()
        return out

    def describe(self) -> str:
        parts: list[str] = []
        node = self
        while node.parent is not None:
            c = node.coord
            if isinstance(c, RationalCoord):
                parts.append(f"{node.var} = {c.value}")
            else:
                assert isinstance(c, AlgebraicCoord)
                if c.box.exact is not None:
                    parts.append(f"{node.var} = {c.box.exact}")
                else:
                    parts.append(f"{node.var} = root({c.defpoly}, ({c.box.lo}, {c.box.hi}))")
            node = node.parent
        parts.reverse()
        return "; ".join(parts) if parts else "()"

    # -- internals ----------------------------------------------------------

    def _rational_assignment(self) -> dict[str, QQ]:
        out: dict[str, QQ] = {}
        node = self
        while node.parent is not None:
            c = node.coord
            if isinstance(c, RationalCoord):
                out[node.var] = c.value
            elif c.box.exact is not None:
                out[node.var] = c.box.exact
            node = node.parent
        return out

    def _psign(self, p: Polynomial) -> int:
        """Sign of ``p`` assuming rational coordinates are already
        substituted (tolerates ones discovered exact since then)."""
        node = self
        while node.parent is not None:
            vs = p.variables()
            if not vs:
                break
            if node.var in vs:
                c = node.coord
                if isinstance(c, RationalCoord):
                    p = p.substitute({node.var: c.value})
                elif c.box.exact is not None:
                    p = p.substitute({node.var: c.box.exact})
                else:
                    return node._alg_sign(p)
            node = node.parent
        if p.variables():
            raise ValueError(
                f"polynomial mentions variables outside the point: {sorted(p.variables())}"
            )
        return qq_sign(qq(p.constant_value()))

    def _box_assignment(self) -> dict[str, tuple[QQ, QQ]]:
        out: dict[str, tuple[QQ, QQ]] = {}
        node = self
        while node.parent is not None:
            c = node.coord
            if isinstance(c, RationalCoord):
                out[node.var] = (c.value, c.value)
            elif c.box.exact is not None:
                out[node.var] = (c.box.exact, c.box.exact)
            else:
                out[node.var] = (c.box.lo, c.box.hi)
            node = node.parent
        return out

    def _enclose(self, p: Polynomial) -> tuple[QQ, QQ]:
        boxes = self._box_assignment()
        lo, hi = qq(0), qq(0)
        for mono, c in p.terms.items():
            cq = qq(c)
            iv = (cq, cq)
            for v, e in mono:
                if v not in boxes:
                    raise ValueError(f"variable {v} has no coordinate here")
                iv = _iv_mul(iv, _iv_pow(boxes[v], e))
            lo, hi = lo + iv[0], hi + iv[1]
        return lo, hi

    def _refine_once(self) -> None:
        c = self.coord
        assert isinstance(c, AlgebraicCoord)
        box = c.box
        if box.exact is not None:
            return
        mid = (box.lo + box.hi) * qq(1, 2)
        s = self.parent._psign(c.defpoly.substitute({self.var: mid}))  # type: ignore[union-attr]
        if s == 0:
            box.exact = mid
            box.lo = box.hi = mid
        elif s == box.s_lo:
            box.lo = mid
        else:
            box.hi = mid

    def _refine_mentioned(self, p: Polynomial) -> None:
        vs = p.variables()
        node = self
        while node.parent is not None:
            if node.var in vs and isinstance(node.coord, AlgebraicCoord):
                if node.coord.box.exact is None:
                    node._refine_once()
            node = node.parent

    def _alg_sign(self, p: Polynomial) -> int:
        key = p.key()
        hit = self._signs.get(key)
        if hit is not None:
            return hit
        s = self._enclosure_sign(p, _CHEAP_ROUNDS)
        if s is None:
            s = self._tarski_sign(p)
        self._signs[key] = s
        return s

    def _enclosure_sign(self, p: Polynomial, rounds: int) -> int | None:
        for attempt in range(rounds + 1):
            lo, hi = self._enclose(p)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if lo == 0 and hi == 0:
                return 0
            if attempt < rounds:
                self._refine_mentioned(p)
        return None

    def _tarski_sign(self, p: Polynomial) -> int:
        """Sign of ``p`` at the unique root of the defining polynomial in the
        isolating interval, by a variation-count query on the signed
        pseudo-remainder sequence of ``(D, D' * p)``."""
        c = self.coord
        assert isinstance(c, AlgebraicCoord) and self.parent is not None
        z = self.var
        d = c.defpoly
        h = _reduce_top(self.parent, p, d, z)
        if h.is_zero():
            return 0
        if z not in h.variables():
            return self.parent._psign(h)
        s1 = _reduce_top(self.parent, poly_derivative(d, z) * h, d, z)
        seq = _signed_prs(self.parent, d, s1, z)
        va = _variations(self.parent, seq, z, c.box.lo)
        vb = _variations(self.parent, seq, z, c.box.hi)
        t = va - vb
        if t not in (-1, 0, 1):
            raise AlgebraicPointError(f"variation query returned {t} for a single root")
        return t


# ---------------------------------------------------------------------------
# Sign-faithful rewriting over a prefix point: trimming, reduction,
# signed pseudo-remainder sequences, variation counts.
# ---------------------------------------------------------------------------


def _even_prem(a: Polynomial, b: Polynomial, var: str) -> Polynomial:
    """``lc(b)**e * a mod b`` with ``e`` even, so evaluated signs carry over."""
    delta = a.degree(var) - b.degree(var)
    r = poly_prem(a, b, var)
    if (delta + 1) % 2 == 1:
        r = r * b.coefficient(var, b.degree(var))
    return r


def _trim(prefix: SamplePoint, p: Polynomial, var: str) -> Polynomial:
    """Drop leading coefficients (in ``var``) that vanish at the prefix."""
    cl = univar_coeffs(p, var)
    while cl and prefix._psign(cl[-1]) == 0:
        cl.pop()
    return from_univar_coeffs(cl, var)


def _reduce_by_point(prefix: SamplePoint, p: Polynomial) -> Polynomial:
    """Reduce degrees in the prefix's algebraic variables.

    Every defining polynomial vanishes at the prefix, so adding multiples of
    them changes nothing at the point; the pseudo-remainder multipliers are
    even powers of leading coefficients nonzero at the prefix.
    """
    node = prefix
    while node.parent is not None:
        w = node.var
        if w in p.variables():
            c = node.coord
            if isinstance(c, RationalCoord):
                p = p.substitute({w: c.value})
            elif c.box.exact is not None:
                p = p.substitute({w: c.box.exact})
            else:
                dpoly = c.defpoly
                dd = dpoly.degree(w)
                while p.degree(w) >= dd and w in p.variables():
                    p = strip_rational_content(_even_prem(p, dpoly, w))
        node = node.parent
    return p


def _reduce_top(prefix: SamplePoint, p: Polynomial, d: Polynomial, z: str) -> Polynomial:
    """Prepare a query polynomial at an algebraic node: reduce by the node's
    own defining polynomial and the prefix chain, trim, strip content."""
    p = _trim(prefix, p, z)
    dd = d.degree(z)
    while p.degree(z) >= dd and z in p.variables():
        p = strip_rational_content(_even_prem(p, d, z))
    p = _reduce_by_point(prefix, p)
    return strip_rational_content(_trim(prefix, p, z))


def _signed_prs(prefix: SamplePoint, s0: Polynomial, s1: Polynomial, var: str) -> list[Polynomial]:
    """Signed pseudo-remainder sequence of ``(s0, s1)`` in ``var``, trimmed
    and predecessor-reduced so that its specialization at the prefix is a
    genuine signed remainder sequence up to positive scalars."""
    if s1.is_zero():
        return [s0]
    seq = [s0, s1]
    while True:
        cur = seq[-1]
        if cur.degree(var) <= 0 or var not in cur.variables():
            break
        r = -_even_prem(seq[-2], cur, var)
        r = strip_rational_content(_trim(prefix, _reduce_by_point(prefix, r), var))
        if r.is_zero():
            break
        seq.append(r)
    return seq


def _variations(prefix: SamplePoint, seq: Sequence[Polynomial], var: str, t: QQ) -> int:
    signs = [prefix._psign(e.substitute({var: t})) for e in seq]
    if signs and signs[0] == 0:
        raise AlgebraicPointError("variation endpoint is a root of the first sequence element")
    out, last = 0, 0
    for s in signs:
        if s == 0:
            continue
        if last != 0 and s != last:
            out += 1
        last = s
    return out


# ---------------------------------------------------------------------------
# Root isolation over a point.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootOverPoint:
    """One section of a polynomial family over a sample point.

    Either an exact rational ``value`` or a defining pair ``(defpoly,
    (lo, hi))`` with ``s_lo`` the defining polynomial's sign at ``lo``.
    ``vanishing`` lists the indices of the family members that are zero at
    this root.
    """

    value: QQ | None
    defpoly: Polynomial | None
    lo: QQ
    hi: QQ
    s_lo: int
    vanishing: frozenset[int]


@dataclass(frozen=True)
class LiftFibre:
    """Roots of a family over a point, with rational gap samples.

    ``gaps`` has one more entry than ``roots``: a rational strictly below
    the first root, strictly between consecutive roots, and strictly above
    the last.  ``identically_zero`` lists family members that vanish on the
    whole fibre.
    """

    roots: tuple[RootOverPoint, ...]
    gaps: tuple[QQ, ...]
    identically_zero: frozenset[int]


class _Cand:
    __slots__ = ("owners", "value", "defpoly", "lo", "hi", "s_lo")

    def __init__(self, owners: set[int], value, defpoly, lo, hi, s_lo) -> None:
        self.owners = owners
        self.value = value
        self.defpoly = defpoly
        self.lo = lo
        self.hi = hi
        self.s_lo = s_lo

    def refine_once(self, point: SamplePoint, var: str) -> None:
        if self.value is not None:
            return
        mid = (self.lo + self.hi) * qq(1, 2)
        s = point._psign(self.defpoly.substitute({var: mid}))
        if s == 0:
            self.value = mid
            self.lo = self.hi = mid
        elif s == self.s_lo:
            self.lo = mid
        else:
            self.hi = mid


def isolate_over(point: SamplePoint, polys: Sequence[Polynomial], var: str) -> LiftFibre:
    """Isolate the real roots of ``polys`` (in ``var``) over ``point``.

    Parameters
    ----------
    point:
        The base point; all variables of the family other than ``var`` must
        have coordinates here.
    polys:
        Polynomials with rational (non-infinitesimal) coefficients.
    var:
        The lifted variable; must not already have a coordinate.

    Returns
    -------
    LiftFibre
        Ordered roots with vanishing sets, rational gap samples, and the
        set of family members that vanish identically on the fibre.
    """
    point._check_new_var(var)
    rat = point._rational_assignment()
    ident: set[int] = set()
    cands: list[_Cand] = []
    for idx, p in enumerate(polys):
        if p.has_tower_coeffs():
            raise ValueError("cannot isolate roots of infinitesimal coefficients")
        q = _trim(point, p.substitute(rat), var)
        if q.is_zero():
            ident.add(idx)
            continue
        if q.degree(var) <= 0:
            continue
        q = _trim(point, strip_rational_content(_reduce_by_point(point, q)), var)
        if q.is_zero() or q.degree(var) <= 0:
            raise AlgebraicPointError("reduction changed the fibre degree")
        if q.variables() <= {var}:
            cands.extend(_isolate_univariate(idx, q, var))
        else:
            cands.extend(_isolate_algebraic(point, idx, q, var))
    _merge(point, cands, var)
    _separate(point, cands, var)
    roots = tuple(
        RootOverPoint(
            value=c.value,
            defpoly=c.defpoly if c.value is None else None,
            lo=c.lo,
            hi=c.hi,
            s_lo=c.s_lo if c.value is None else 0,
            vanishing=frozenset(c.owners),
        )
        for c in cands
    )
    gaps: list[QQ] = []
    if not roots:
        gaps.append(qq(0))
    else:
        gaps.append(cands[0].lo - 1)
        for i in range(len(cands) - 1):
            gaps.append((cands[i].hi + cands[i + 1].lo) * qq(1, 2))
        gaps.append(cands[-1].hi + 1)
    return LiftFibre(roots=roots, gaps=tuple(gaps), identically_zero=frozenset(ident))


def _isolate_univariate(idx: int, q: Polynomial, var: str) -> list[_Cand]:
    cl = [qq(c.constant_value()) for c in univar_coeffs(q, var)]
    sf = uv.squarefree_part(cl)
    sfpoly = from_univar_coeffs([constant(c) for c in sf], var)
    rational = uv.rational_roots(cl)
    out: list[_Cand] = []
    for a, b in uv.isolate(cl):
        if a == b:
            out.append(_Cand({idx}, a, None, a, a, 0))
            continue
        hits = [r for r in rational if a < r < b]
        if hits:
            out.append(_Cand({idx}, hits[0], None, hits[0], hits[0], 0))
            continue
        s_lo = uv.eval_sign(sf, a)
        if s_lo == 0 or s_lo != -uv.eval_sign(sf, b):
            raise AlgebraicPointError("isolating interval lost its sign change")
        out.append(_Cand({idx}, None, sfpoly, a, b, s_lo))
    return out


def _count_chain(point: SamplePoint, f: Polynomial, var: str) -> list[Polynomial]:
    s1 = strip_rational_content(_trim(point, _reduce_by_point(point, poly_derivative(f, var)), var))
    return _signed_prs(point, f, s1, var)


def _root_bound(point: SamplePoint, f: Polynomial, var: str) -> QQ:
    """A power of two strictly exceeding every root of ``f`` over the point."""
    cl = univar_coeffs(f, var)
    lc = cl[-1]
    for _ in range(_MAX_REFINE):
        lo, hi = point._enclose(lc)
        if lo > 0 or hi < 0:
            break
        point._refine_mentioned(lc)
    else:
        raise AlgebraicPointError("leading coefficient enclosure failed to exclude zero")
    denom = min(abs(lo), abs(hi))
    num = qq(0)
    for c in cl[:-1]:
        clo, chi = point._enclose(c)
        num = max(num, max(abs(clo), abs(chi)))
    bound = 1 + num / denom
    b = qq(1)
    while b < bound:
        b = b * 2
    return b


def _isolate_algebraic(point: SamplePoint, idx: int, f: Polynomial, var: str) -> list[_Cand]:
    chain = _count_chain(point, f, var)
    vcache: dict[QQ, int] = {}

    def variations(t: QQ) -> int:
        hit = vcache.get(t)
        if hit is None:
            hit = _variations(point, chain, var, t)
            vcache[t] = hit
        return hit

    def count(a: QQ, b: QQ) -> int:
        return variations(a) - variations(b)

    def fsign(t: QQ) -> int:
        return point._psign(f.substitute({var: t}))

    b0 = _root_bound(point, f, var)
    if fsign(-b0) == 0 or fsign(b0) == 0:
        raise AlgebraicPointError("root bound is not strict")
    out: list[_Cand] = []
    total = count(-b0, b0)
    stack = [(-b0, b0, total)] if total else []
    while stack:
        a, b, n = stack.pop()
        if n == 1:
            out.append(_interval_cand(point, idx, f, a, b, var))
            continue
        mid = (a + b) * qq(1, 2)
        s = fsign(mid)
        if s == 0:
            t = (b - a) * qq(1, 4)
            guard = 0
            while not (
                fsign(mid - t) != 0 and fsign(mid + t) != 0 and count(mid - t, mid + t) == 1
            ):
                t = t * qq(1, 2)
                guard += 1
                if guard > _MAX_REFINE:
                    raise AlgebraicPointError("failed to isolate an exact rational root")
            out.append(_Cand({idx}, mid, None, mid, mid, 0))
            nl = count(a, mid - t)
            nr = n - 1 - nl
            if nl:
                stack.append((a, mid - t, nl))
            if nr:
                stack.append((mid + t, b, nr))
        else:
            nl = count(a, mid)
            nr = n - nl
            if nl:
                stack.append((a, mid, nl))
            if nr:
                stack.append((mid, b, nr))
    return out


def _interval_cand(
    point: SamplePoint, idx: int, f: Polynomial, a: QQ, b: QQ, var: str
) -> _Cand:
    """Descend derivative gcds until the candidate root is simple."""
    d = f
    while True:
        chain = _count_chain(point, d, var)
        last = chain[-1]
        if last.degree(var) <= 0 or var not in last.variables():
            break
        gchain = _count_chain(point, last, var)
        n = _variations(point, gchain, var, a) - _variations(point, gchain, var, b)
        if n == 0:
            break
        if n != 1:
            raise AlgebraicPointError("derivative gcd gained roots in an isolating interval")
        d = last
    s_lo = point._psign(d.substitute({var: a}))
    s_hi = point._psign(d.substitute({var: b}))
    if s_lo == 0 or s_lo * s_hi != -1:
        raise AlgebraicPointError("defining polynomial does not change sign on the interval")
    return _Cand({idx}, None, d, a, b, s_lo)


def _overlap(a: _Cand, b: _Cand) -> bool:
    if a.value is not None and b.value is not None:
        return a.value == b.value
    return not (a.hi <= b.lo or b.hi <= a.lo)


def _merge(point: SamplePoint, cands: list[_Cand], var: str) -> None:
    changed = True
    while changed:
        changed = False
        cands.sort(key=lambda c: (c.lo, c.hi))
        for i in range(len(cands) - 1):
            a, b = cands[i], cands[i + 1]
            if not _overlap(a, b):
                continue
            if _same_root(point, a, b, var):
                a.owners |= b.owners
                if a.value is None and (
                    b.value is not None
                    or b.defpoly.degree(var) < a.defpoly.degree(var)
                ):
                    a.value, a.defpoly = b.value, b.defpoly
                    a.lo, a.hi, a.s_lo = b.lo, b.hi, b.s_lo
                del cands[i + 1]
            changed = True
            break


def _same_root(point: SamplePoint, a: _Cand, b: _Cand, var: str) -> bool:
    """Decide whether two overlapping candidates are the same root,
    refining their intervals as a side effect."""
    if a.value is not None and b.value is not None:
        return a.value == b.value
    if a.value is not None or b.value is not None:
        if a.value is None:
            a, b = b, a
        r = a.value
        s = point._psign(b.defpoly.substitute({var: r}))
        if s == 0:
            if b.lo < r < b.hi:
                return True
            raise AlgebraicPointError("isolating interval endpoint is a root")
        for _ in range(_MAX_REFINE):
            if not _overlap(a, b):
                return False
            b.refine_once(point, var)
        raise AlgebraicPointError("failed to separate a rational from an algebraic root")
    # Cheap joint bisection first: genuinely distinct roots usually part
    # after a few rounds, and that avoids the exact comparison entirely.
    for _ in range(_QUICK_SEPARATE):
        if not _overlap(a, b):
            return False
        a.refine_once(point, var)
        b.refine_once(point, var)
        if a.value is not None or b.value is not None:
            # An exact value may coincide with a root of the other defining
            # polynomial outside the other interval, so recheck overlap
            # before delegating to the rational-versus-algebraic branch.
            if not _overlap(a, b):
                return False
            return _same_root(point, a, b, var)
    ext = point.extend_algebraic(var, a.defpoly, a.lo, a.hi, a.s_lo)
    s = ext._psign(b.defpoly)
    if s != 0:
        for _ in range(_MAX_REFINE):
            if not _overlap(a, b):
                return False
            a.refine_once(point, var)
            b.refine_once(point, var)
        raise AlgebraicPointError("failed to separate two distinct roots")
    for _ in range(_MAX_REFINE):
        if b.lo <= a.lo and a.hi <= b.hi:
            return True
        if not _overlap(a, b):
            return False
        a.refine_once(point, var)
        if a.value is not None:
            return _same_root(point, a, b, var)
    raise AlgebraicPointError("failed to compare two overlapping roots")


def _separate(point: SamplePoint, cands: list[_Cand], var: str) -> None:
    """Refine until consecutive intervals are disjoint, with strict gaps
    next to exact roots so gap midpoints are never roots."""
    cands.sort(key=lambda c: (c.lo, c.hi))
    for i in range(len(cands) - 1):
        a, b = cands[i], cands[i + 1]
        guard = 0
        while a.hi > b.lo or (
            a.hi == b.lo and (a.value is not None or b.value is not None)
        ):
            a.refine_once(point, var)
            b.refine_once(point, var)
            guard += 1
            if guard > _MAX_REFINE:
                raise AlgebraicPointError("failed to separate neighbouring roots")
