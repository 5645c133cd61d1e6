"""Sparse multivariate polynomials over exact scalars, plus the quadratic
pencil machinery.

Variables are strings with a role letter and an index: ``Y0, Y1, ...`` (the
quadratic block; ``Y0`` is the homogenization variable), ``X1, X2, ...``
(the parameter block), ``Z1, Z2, ...`` (pencil multipliers), and ``T`` (the
characteristic-polynomial variable).  Coefficients are exact rationals or
:class:`~quadchi.scalars.TowerElement` values; mixed arithmetic promotes
transparently.

A polynomial is a mapping from monomials — sorted tuples of ``(var, exp)``
pairs — to nonzero coefficients.  Iteration and printing order monomials by
graded lexicographic rank (total degree first) over the canonical variable
order T < X < Y < Z, each role ordered by index, so all output is
deterministic.

The pencil machinery turns a family of Y-homogeneous quadratics
``Q_1, ..., Q_m`` into the symmetric matrix ``M(Z, X) = sum_i Z_i * A_i``
of the form ``<Z, Q>`` and computes ``det(T*Id - M)`` by the
Faddeev-LeVerrier recurrence (exact over the rationals: the only divisions
are by integers).
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Mapping, Sequence, Union

from .scalars import QQ, Rat, TowerElement, qq, tower_eps, tower_sign

__all__ = [
    "Polynomial",
    "variable",
    "constant",
    "parse_polynomial",
    "PolyParseError",
    "quadratic_form_matrix",
    "pencil_matrix",
    "char_poly",
    "homogenize_in_y",
    "univar_coeffs",
    "from_univar_coeffs",
    "poly_derivative",
    "poly_prem",
    "strip_rational_content",
    "subresultant_prs",
    "principal_subres_coeffs",
]

Coeff = Union[int, "QQ", TowerElement]
Monomial = tuple[tuple[str, int], ...]

_VAR_RE = re.compile(r"^(Y|X|Z)(\d+)$|^T$")
_ROLE_RANK = {"T": 0, "X": 1, "Y": 2, "Z": 3}


def _var_key(name: str) -> tuple[int, int]:
    """Sort key for canonical variable order (alphabetical role, then index)."""
    if name == "T":
        return (0, 0)
    m = _VAR_RE.match(name)
    if not m or m.group(1) is None:
        raise ValueError(f"unknown variable name {name!r}")
    return (_ROLE_RANK[m.group(1)], int(m.group(2)))


def _mono_sort_key(mono: Monomial) -> tuple:
    total = sum(e for _, e in mono)
    return (-total, tuple((_var_key(v), -e) for v, e in mono))


def _coeff_is_zero(c: Coeff) -> bool:
    if isinstance(c, TowerElement):
        return c.is_zero()
    return c == 0


def _coeff_key(c: Coeff):
    """Hashable canonical form of a coefficient.

    A tower element that happens to be constant keys identically to the
    plain rational, so equal polynomials compare equal regardless of how
    their coefficients were built.
    """
    if isinstance(c, TowerElement):
        if c.is_constant():
            c = c.constant_value()
        else:
            return ("tower", c.coeffs)
    c = qq(c)
    return ("rat", int(c.numerator), int(c.denominator))


class Polynomial:
    """Immutable sparse multivariate polynomial.

    Examples
    --------
    >>> x, y = variable("X1"), variable("Y1")
    >>> p = 3 * x**2 * y - y / 2 + 1
    >>> p.degree_in_role("Y"), p.degree_in_role("X")
    (1, 2)
    >>> str(p)
    '3*X1^2*Y1 - 1/2*Y1 + 1'
    """

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms: Mapping[Monomial, Coeff]):
        clean: dict[Monomial, Coeff] = {}
        for mono, c in terms.items():
            if not _coeff_is_zero(c):
                clean[mono] = c
        self.terms: dict[Monomial, Coeff] = clean
        self._key = None
        self._hash = None

    # -- construction helpers -------------------------------------------

    @staticmethod
    def zero() -> Polynomial:
        return Polynomial({})

    def sorted_terms(self) -> list[tuple[Monomial, Coeff]]:
        return sorted(self.terms.items(), key=lambda kv: _mono_sort_key(kv[0]))

    # -- ring operations -------------------------------------------------

    def _coerce(self, other) -> Polynomial | None:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, TowerElement)) or type(other).__name__ in (
            "mpq",
            "Fraction",
        ):
            return Polynomial({(): other})
        return None

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mono, c in other.terms.items():
            if mono in out:
                out[mono] = out[mono] + c
            else:
                out[mono] = c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[Monomial, Coeff] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _merge_monomials(m1, m2)
                c = c1 * c2
                if mono in out:
                    out[mono] = out[mono] + c
                else:
                    out[mono] = c
        return Polynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Polynomial:
        if isinstance(other, int) or type(other).__name__ in ("mpq", "Fraction"):
            return self * (qq(1) / qq(other))
        return NotImplemented

    def __pow__(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError("negative polynomial powers are not defined")
        result = Polynomial({(): 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def key(self) -> tuple:
        """Canonical hashable form (used for memoization and equality)."""
        if self._key is None:
            self._key = tuple(
                (mono, _coeff_key(c)) for mono, c in self.sorted_terms()
            )
        return self._key

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Coeff:
        if not self.terms:
            return qq(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms[()]

    def variables(self) -> set[str]:
        return {v for mono in self.terms for v, _ in mono}

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in one variable; -1 for the zero poly."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max((e for m in self.terms for v, e in m if v == var), default=0)

    def degree_in_role(self, role: str) -> int:
        """Max total degree over the variables of one role letter."""
        if not self.terms:
            return -1
        return max(sum(e for v, e in m if v[0] == role) for m in self.terms)

    def coefficient(self, var: str, exp: int) -> Polynomial:
        """The coefficient of ``var**exp`` (a polynomial in the others)."""
        out: dict[Monomial, Coeff] = {}
        for mono, c in self.terms.items():
            d = dict(mono)
            if d.get(var, 0) == exp:
                d.pop(var, None)
                key = _make_monomial(d)
                out[key] = out.get(key, qq(0)) + c
        return Polynomial(out)

    def has_tower_coeffs(self) -> bool:
        return any(
            isinstance(c, TowerElement) and not c.is_constant()
            for c in self.terms.values()
        )

    def tower_size(self) -> int:
        return max(
            (c.size for c in self.terms.values() if isinstance(c, TowerElement)),
            default=0,
        )

    # -- morphisms -------------------------------------------------------

    def substitute(self, assignment: Mapping[str, "Polynomial | Rat"]) -> Polynomial:
        """Substitute polynomials or scalars for variables (others unchanged)."""
        if all(
            isinstance(rep, int) or type(rep).__name__ in ("mpq", "Fraction")
            for rep in assignment.values()
        ):
            # All-scalar assignments stay at the coefficient level: no
            # polynomial products are formed, only rational powers.
            vals = {v: qq(rep) for v, rep in assignment.items()}
            out: dict[Monomial, Coeff] = {}
            for mono, c in self.terms.items():
                factor = None
                kept: dict[str, int] = {}
                for v, e in mono:
                    val = vals.get(v)
                    if val is None:
                        kept[v] = e
                    else:
                        factor = val**e if factor is None else factor * val**e
                key = mono if len(kept) == len(mono) else _make_monomial(kept)
                nc = c if factor is None else c * factor
                prev = out.get(key)
                out[key] = nc if prev is None else prev + nc
            return Polynomial(out)
        result = Polynomial.zero()
        for mono, c in self.terms.items():
            term = Polynomial({(): c})
            for v, e in mono:
                if v in assignment:
                    rep = assignment[v]
                    if not isinstance(rep, Polynomial):
                        rep = Polynomial({(): rep})
                    term = term * rep**e
                else:
                    term = term * Polynomial({((v, e),): 1})
            result = result + term
        return result

    def instantiate_tower(self, values: Sequence[Rat]) -> Polynomial:
        """Replace tower coefficients by their values at ``eps_i = values[i]``."""
        out: dict[Monomial, Coeff] = {}
        for mono, c in self.terms.items():
            if isinstance(c, TowerElement):
                c = c.instantiate(list(values)[: c.size]) if c.size else c.constant_value()
            out[mono] = c
        return Polynomial(out)

    def leading_sign(self) -> int:
        """Sign of the coefficient of the graded-lex leading monomial."""
        if not self.terms:
            return 0
        mono = min(self.terms, key=_mono_sort_key)
        return tower_sign(self.terms[mono])

    # -- printing --------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono, c in self.sorted_terms():
            parts.append(_format_term(mono, c))
        out = parts[0]
        for piece in parts[1:]:
            if piece.startswith("-"):
                out += " - " + piece[1:]
            else:
                out += " + " + piece
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _make_monomial(d: Mapping[str, int]) -> Monomial:
    return tuple(sorted(((v, e) for v, e in d.items() if e), key=lambda p: _var_key(p[0])))


def _merge_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return _make_monomial(d)


def _format_coeff(c: Coeff) -> tuple[str, bool]:
    """Render a coefficient; the bool says whether it is a bare '+-1'."""
    if isinstance(c, TowerElement):
        if c.is_constant():
            c = c.constant_value()
        else:
            s = str(c)
            if len(c.coeffs) > 1:
                return f"({s})", False
            return s, False
    c = qq(c)
    if c == 1:
        return "1", True
    if c == -1:
        return "-1", True
    return str(c), False


def _format_term(mono: Monomial, c: Coeff) -> str:
    cs, is_unit = _format_coeff(c)
    factors = [v if e == 1 else f"{v}^{e}" for v, e in mono]
    if not factors:
        return cs
    if is_unit:
        head = "-" if cs == "-1" else ""
        return head + "*".join(factors)
    return cs + "*" + "*".join(factors)


def variable(name: str) -> Polynomial:
    """The polynomial consisting of one variable."""
    _var_key(name)  # validates
    return Polynomial({((name, 1),): 1})


def constant(c: Coeff) -> Polynomial:
    return Polynomial({(): c})


class PolyParseError(ValueError):
    """Raised on malformed polynomial text."""


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*^]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise PolyParseError(f"unexpected character {rest[0]!r} in polynomial")
        if m.group("num") is not None:
            tokens.append(("num", m.group("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, tower_size: int = 0) -> Polynomial:
    """Parse canonical polynomial syntax.

    The grammar is a flat signed sum of terms; each term is a ``*``-product
    of factors; a factor is a rational number ``p`` or ``p/q``, a variable
    (``Y0``, ``X3``, ``Z1``, ``T``), optionally raised by ``^`` to a
    nonnegative integer power, or an infinitesimal ``eps0, eps1, ...``
    (which lands in the coefficient tower).

    >>> str(parse_polynomial("3*X1^2*Y2 - 1/2*Y0*Y1 + 1"))
    '3*X1^2*Y2 - 1/2*Y0*Y1 + 1'
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolyParseError("empty polynomial")
    result = Polynomial.zero()
    i = 0
    n = len(tokens)

    def parse_factor(idx: int, sign_coeff, mono: dict, eps: dict):
        kind, val = tokens[idx]
        if kind == "num":
            if "/" in val:
                a, b = val.split("/")
                if int(b) == 0:
                    raise PolyParseError("zero denominator")
                c = qq(int(a), int(b))
            else:
                c = qq(int(val))
            return idx + 1, sign_coeff * c
        if kind == "name":
            exp = 1
            nxt = idx + 1
            if nxt < n and tokens[nxt] == ("op", "^"):
                if nxt + 1 >= n or tokens[nxt + 1][0] != "num" or "/" in tokens[nxt + 1][1]:
                    raise PolyParseError("exponent must be a nonnegative integer")
                exp = int(tokens[nxt + 1][1])
                nxt += 2
            m = re.match(r"^eps(\d+)$", val)
            if m:
                k = int(m.group(1))
                eps[k] = eps.get(k, 0) + exp
            else:
                try:
                    _var_key(val)
                except ValueError as exc:
                    raise PolyParseError(str(exc)) from None
                mono[val] = mono.get(val, 0) + exp
            return nxt, sign_coeff
        raise PolyParseError(f"unexpected token {val!r}")

    while i < n:
        sign = 1
        while i < n and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        if i >= n:
            raise PolyParseError("dangling sign")
        coeff = qq(sign)
        mono: dict[str, int] = {}
        eps: dict[int, int] = {}
        i, coeff = parse_factor(i, coeff, mono, eps)
        while i < n and tokens[i] == ("op", "*"):
            if i + 1 >= n:
                raise PolyParseError("dangling '*'")
            i, coeff = parse_factor(i + 1, coeff, mono, eps)
        if i < n and tokens[i][0] == "op" and tokens[i][1] == "^":
            raise PolyParseError("misplaced '^'")
        if eps:
            size = max(max(eps) + 1, tower_size)
            key = tuple(eps.get(j, 0) for j in range(max(eps) + 1))
            coeff = TowerElement.from_dict({key: coeff}, size)
        term = Polynomial({_make_monomial(mono): coeff})
        result = result + term
        if i < n and (tokens[i][0] != "op" or tokens[i][1] not in "+-"):
            raise PolyParseError(f"expected '+' or '-' before {tokens[i][1]!r}")
    return result


# -- quadratic pencils ----------------------------------------------------


def homogenize_in_y(p: Polynomial, ell: int) -> Polynomial:
    """Homogenize to Y-degree exactly 2 using ``Y0``.

    Requires total Y-degree at most 2 and no prior mention of ``Y0``.
    """
    if "Y0" in p.variables():
        raise ValueError("input already mentions Y0")
    out: dict[Monomial, Coeff] = {}
    for mono, c in p.terms.items():
        ydeg = sum(e for v, e in mono if v[0] == "Y")
        if ydeg > 2:
            raise ValueError(f"Y-degree {ydeg} exceeds 2; cannot homogenize")
        d = dict(mono)
        if ydeg < 2:
            d["Y0"] = 2 - ydeg
        key = _make_monomial(d)
        out[key] = out.get(key, qq(0)) + c
    return Polynomial(out)


def quadratic_form_matrix(p: Polynomial, ell: int) -> list[list[Polynomial]]:
    """Symmetric (ell+1)x(ell+1) matrix of a Y-homogeneous quadratic.

    Entry (i, j) is a polynomial in the non-Y variables; off-diagonal
    entries are half the mixed coefficients, so
    ``p = sum_{i,j} M[i][j] * Y_i * Y_j``.
    """
    size = ell + 1
    m = [[Polynomial.zero() for _ in range(size)] for _ in range(size)]
    for mono, c in p.terms.items():
        yparts = [(v, e) for v, e in mono if v[0] == "Y"]
        rest = _make_monomial({v: e for v, e in mono if v[0] != "Y"})
        ydeg = sum(e for _, e in yparts)
        if ydeg != 2:
            raise ValueError("polynomial is not Y-homogeneous of degree 2")
        if len(yparts) == 1:
            (v, e) = yparts[0]
            i = int(v[1:])
            if i > ell:
                raise ValueError(f"{v} outside Y0..Y{ell}")
            m[i][i] = m[i][i] + Polynomial({rest: c})
        else:
            (v1, _), (v2, _) = yparts
            i, j = int(v1[1:]), int(v2[1:])
            if max(i, j) > ell:
                raise ValueError("Y index outside the block")
            half = Polynomial({rest: c * qq(1, 2)})
            m[i][j] = m[i][j] + half
            m[j][i] = m[j][i] + half
    return m


def pencil_matrix(
    q_homogeneous: Sequence[Polynomial], ell: int
) -> list[list[Polynomial]]:
    """The symmetric matrix of ``<Z, Q> = sum_i Z_i * Q_i`` (entries in Z, X)."""
    size = ell + 1
    total = [[Polynomial.zero() for _ in range(size)] for _ in range(size)]
    for idx, q in enumerate(q_homogeneous, start=1):
        z = variable(f"Z{idx}")
        a = quadratic_form_matrix(q, ell)
        for i in range(size):
            for j in range(size):
                total[i][j] = total[i][j] + z * a[i][j]
    return total


def _mat_mul(a: list[list[Polynomial]], b: list[list[Polynomial]]) -> list[list[Polynomial]]:
    n = len(a)
    return [
        [
            sum((a[i][k] * b[k][j] for k in range(n)), Polynomial.zero())
            for j in range(n)
        ]
        for i in range(n)
    ]


def _trace(a: list[list[Polynomial]]) -> Polynomial:
    return sum((a[i][i] for i in range(len(a))), Polynomial.zero())


def char_poly(matrix: Sequence[Sequence[Polynomial]]) -> list[Polynomial]:
    """Coefficients ``[C_0, ..., C_n]`` of ``det(T*Id - M)``, ascending.

    Faddeev-LeVerrier: with ``B_0 = Id``,
    ``c_{n-k} = -tr(M B_{k-1}) / k`` and ``B_k = M B_{k-1} + c_{n-k} Id``.
    All divisions are by integers, hence exact over the rationals.  The
    leading coefficient ``C_n`` is 1.
    """
    n = len(matrix)
    m = [list(row) for row in matrix]
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    coeffs = [Polynomial.zero()] * (n + 1)
    coeffs[n] = constant(1)
    b = [[constant(1) if i == j else Polynomial.zero() for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        mb = _mat_mul(m, b)
        ck = -_trace(mb) * qq(1, k)
        coeffs[n - k] = ck
        b = [row[:] for row in mb]
        for i in range(n):
            b[i][i] = b[i][i] + ck
    return coeffs


# ---------------------------------------------------------------------------
# Univariate views: a multivariate polynomial regarded as univariate in one
# chosen variable, with polynomial coefficients.  These are the primitives
# behind elimination (projection) and sign determination at algebraic points.
# ---------------------------------------------------------------------------


def univar_coeffs(p: Polynomial, var: str) -> list[Polynomial]:
    """Ascending coefficient list of ``p`` viewed as univariate in ``var``.

    The entries are polynomials in the remaining variables.  The zero
    polynomial yields ``[]``; a polynomial not mentioning ``var`` yields a
    one-element list.
    """
    if p.is_zero():
        return []
    d = p.degree(var)
    return [p.coefficient(var, i) for i in range(d + 1)]


def from_univar_coeffs(coeffs: Sequence[Polynomial], var: str) -> Polynomial:
    """Inverse of :func:`univar_coeffs`."""
    x = variable(var)
    total = Polynomial.zero()
    power = constant(1)
    for c in coeffs:
        if not c.is_zero():
            total = total + c * power
        power = power * x
    return total


def poly_derivative(p: Polynomial, var: str) -> Polynomial:
    """Partial derivative of ``p`` with respect to ``var``."""
    out: dict[Monomial, Coeff] = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        e = d.get(var, 0)
        if e == 0:
            continue
        d[var] = e - 1
        key = _make_monomial(d)
        out[key] = out.get(key, qq(0)) + c * e
    return Polynomial(out)


def poly_prem(a: Polynomial, b: Polynomial, var: str) -> Polynomial:
    """Pseudo-remainder of ``a`` by ``b`` in ``var``: ``lc(b)^(d+1) * a mod b``.

    ``d = deg_var(a) - deg_var(b)`` must be >= 0 and ``b`` must have positive
    degree in ``var``.  The full remainder sequence scales uniformly by the
    leading coefficient at every one of the ``d+1`` elimination steps, so the
    multiplier is exactly ``lc(b)**(d+1)`` -- a known, fixed parity that
    callers rely on when they need sign-faithful (even-power) variants.
    """
    da, db = a.degree(var), b.degree(var)
    if db <= 0:
        raise ValueError("divisor must have positive degree in the variable")
    if da < db:
        return a
    lc = b.coefficient(var, db)
    r = univar_coeffs(a, var)
    q = univar_coeffs(b, var)
    for k in range(da - db, -1, -1):
        c = r[db + k]
        r = [lc * ri for ri in r]
        for j in range(db + 1):
            r[j + k] = r[j + k] - c * q[j]
    return from_univar_coeffs(r[:db], var)


def strip_rational_content(p: Polynomial) -> Polynomial:
    """Divide out the positive rational content (sign-preserving rescale).

    Returns ``p`` unchanged when any coefficient is an infinitesimal tower
    element, or when ``p`` is zero.
    """
    nums: list[int] = []
    dens: list[int] = []
    for c in p.terms.values():
        if isinstance(c, TowerElement):
            return p
        r = qq(c)
        nums.append(abs(int(r.numerator)))
        dens.append(int(r.denominator))
    if not nums:
        return p
    g = 0
    for x in nums:
        g = math.gcd(g, x)
    l = 1
    for x in dens:
        l = l * x // math.gcd(l, x)
    if g == 0:
        return p
    scale = qq(l, g)
    if scale == 1:
        return p
    return p * scale


def _mono_order_key(mono: Monomial, var_order: Sequence[str]) -> tuple:
    exps = dict(mono)
    vec = tuple(exps.get(v, 0) for v in var_order)
    return (sum(vec), vec)


def poly_exact_div(p: Polynomial, d: Polynomial) -> Polynomial:
    """Exact quotient ``p / d``; raises ``ValueError`` if not divisible.

    Cancels leading terms under a graded-lexicographic monomial order, which
    is multiplication-compatible, so for an exact multiple the leading term
    of the running remainder is always divisible by the leading term of the
    divisor and the loop terminates.
    """
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p
    var_order = sorted(p.variables() | d.variables(), key=_var_key)
    d_lead = max(d.terms, key=lambda m: _mono_order_key(m, var_order))
    d_lc = d.terms[d_lead]
    d_exp = dict(d_lead)
    rem = p
    quot: dict[Monomial, Coeff] = {}
    while not rem.is_zero():
        r_lead = max(rem.terms, key=lambda m: _mono_order_key(m, var_order))
        r_exp = dict(r_lead)
        t_exp = {v: r_exp.get(v, 0) - d_exp.get(v, 0) for v in set(r_exp) | set(d_exp)}
        if any(e < 0 for e in t_exp.values()):
            raise ValueError("not an exact multiple")
        if isinstance(rem.terms[r_lead], TowerElement) or isinstance(d_lc, TowerElement):
            raise ValueError("exact division requires rational coefficients")
        coeff = qq(rem.terms[r_lead]) / qq(d_lc)
        key = _make_monomial(t_exp)
        quot[key] = quot.get(key, qq(0)) + coeff
        rem = rem - Polynomial({key: coeff}) * d
    return Polynomial(quot)


def subresultant_prs(a: Polynomial, b: Polynomial, var: str) -> list[Polynomial]:
    """Subresultant polynomial remainder sequence of ``a, b`` in ``var``.

    Uses the classical exact-division normalization, which keeps coefficient
    growth polynomial while every element stays a (nonzero rational multiple
    of a) subresultant of the pair.  The list starts with the two inputs
    (higher degree first) and ends with the last nonzero remainder.  Signs
    are not normalized; callers must only rely on zero sets and degrees.
    """
    if a.degree(var) < b.degree(var):
        a, b = b, a
    if b.is_zero():
        return [a] if not a.is_zero() else []
    prs = [a, b]
    g = constant(1)
    h = constant(1)
    cur, nxt = a, b
    while True:
        e = nxt.degree(var)
        if e <= 0:
            break
        delta = cur.degree(var) - e
        r = poly_prem(cur, nxt, var)
        if r.is_zero():
            break
        new = poly_exact_div(r, g * _poly_pow(h, delta))
        prs.append(new)
        g = nxt.coefficient(var, e)
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = poly_exact_div(_poly_pow(g, delta), _poly_pow(h, delta - 1))
        cur, nxt = nxt, new
    return prs


def _poly_pow(p: Polynomial, n: int) -> Polynomial:
    out = constant(1)
    for _ in range(n):
        out = out * p
    return out


def principal_subres_coeffs(a: Polynomial, b: Polynomial, var: str) -> list[Polynomial]:
    """Leading coefficients (in ``var``) of the proper subresultants of a pair.

    These are the polynomials whose sign-invariance controls how the degree
    of ``gcd(a, b)`` can change under specialization of the remaining
    variables; they are the pairwise contribution to a projection set.  The
    two inputs themselves are excluded (their leading coefficients enter a
    projection through the reducta chain instead).
    """
    out: list[Polynomial] = []
    for s in subresultant_prs(a, b, var)[2:]:
        d = s.degree(var)
        lc = s.coefficient(var, d) if d >= 0 else Polynomial.zero()
        if not lc.is_zero():
            out.append(lc)
    return out
