"""Exact scalar arithmetic: rationals and elements of an infinitesimal tower.

Every number in this package is either an exact rational (``QQ``) or a
polynomial in a finite tower of positive infinitesimals ``eps0, eps1, ...``
with rational coefficients (:class:`TowerElement`).  The tower is ordered

    0 < eps_n << ... << eps1 << eps0 << 1,

meaning each ``eps_{i+1}`` is smaller than every positive power of ``eps_i``.
Consequently a nonzero tower element has the sign of the coefficient of its
*dominant* monomial: the monomial ``eps0^{e_0} * ... * eps_n^{e_n}`` whose
reversed exponent tuple ``(e_n, ..., e_0)`` is lexicographically smallest.
(Reading exponents from the smallest infinitesimal down, the first difference
decides which monomial is infinitely larger.)

Numeric instantiation substitutes the geometric assignment
``eps_i = eta ** (base ** i)`` for a rational ``eta`` in (0, 1) (default
``base = 3``).  For monomials whose per-variable exponents stay below
``base`` this assignment is provably faithful to the symbolic order (base-3
digit comparison); beyond that, distinct monomials can collide for *every*
``eta`` of the schedule (e.g. ``eps0**6`` and ``eps1**2`` under base 3), so
callers relying on instantiation for sign decisions should either raise the
base or confirm stability of downstream integer results under refinement of
``eta`` — the package's epsilon-stability protocol does the latter.

Rationals are ``gmpy2.mpq`` when gmpy2 is importable and
``fractions.Fraction`` otherwise; both expose ``numerator``/``denominator``
and print as ``p/q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

try:  # pragma: no cover - exercised implicitly by whichever backend is present
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ  # type: ignore[assignment]

__all__ = [
    "QQ",
    "Rat",
    "qq",
    "qq_sign",
    "TowerElement",
    "tower_eps",
    "tower_sign",
    "geometric_assignment",
    "InstantiationError",
]

#: Anything accepted where a rational is expected.
Rat = Union[int, "QQ"]


def qq(value: Rat | str, den: int | None = None) -> QQ:
    """Coerce ``value`` (int, rational, or ``"p/q"`` string) to ``QQ``."""
    if den is not None:
        return QQ(value, den)
    return QQ(value)


def qq_sign(a: Rat) -> int:
    """Sign of a rational as -1, 0, or 1."""
    if a > 0:
        return 1
    if a < 0:
        return -1
    return 0


class InstantiationError(ValueError):
    """Raised when a tower element cannot be numerically instantiated."""


def _revkey(key: tuple[int, ...], width: int) -> tuple[int, ...]:
    """Exponents padded to ``width`` and reversed (most-significant first)."""
    return tuple(reversed(key + (0,) * (width - len(key))))


def _normalize_key(key: tuple[int, ...]) -> tuple[int, ...]:
    """Strip trailing zero exponents so keys are canonical."""
    n = len(key)
    while n and key[n - 1] == 0:
        n -= 1
    return key[:n]


@dataclass(frozen=True)
class TowerElement:
    """A polynomial in the infinitesimals ``eps0 .. eps_{size-1}`` over QQ.

    ``coeffs`` maps exponent tuples (index ``i`` = exponent of ``eps_i``,
    trailing zeros stripped) to nonzero rational coefficients.  The empty
    tuple is the constant term.  ``size`` is the number of tower variables
    the element is considered to live over; it bounds the length of every
    key and fixes the arity of :meth:`instantiate`.

    Examples
    --------
    >>> e0, e1 = tower_eps(0, size=2), tower_eps(1, size=2)
    >>> (3 * e1 - e0).sign()
    -1
    >>> (e0 * e0 - e1).sign()
    1
    >>> (e0 - e0).sign()
    0
    """

    coeffs: tuple[tuple[tuple[int, ...], QQ], ...]
    size: int

    # -- construction ----------------------------------------------------

    @staticmethod
    def from_dict(d: Mapping[tuple[int, ...], Rat], size: int) -> TowerElement:
        clean: dict[tuple[int, ...], QQ] = {}
        for key, val in d.items():
            key = _normalize_key(tuple(key))
            if len(key) > size:
                raise ValueError(f"exponent tuple {key} exceeds tower size {size}")
            if any(e < 0 for e in key):
                raise ValueError(f"negative exponent in {key}")
            q = qq(val)
            if q != 0:
                clean[key] = clean.get(key, qq(0)) + q
                if clean[key] == 0:
                    del clean[key]
        items = tuple(sorted(clean.items(), key=lambda kv: kv[0]))
        return TowerElement(items, size)

    @staticmethod
    def constant(value: Rat, size: int = 0) -> TowerElement:
        return TowerElement.from_dict({(): qq(value)}, size)

    # -- ring structure --------------------------------------------------

    def _with(self, other: Rat | TowerElement) -> TowerElement:
        """Coerce ``other`` to a TowerElement over a common tower size."""
        if isinstance(other, TowerElement):
            if other.size == self.size:
                return other
            size = max(self.size, other.size)
            return TowerElement(other.coeffs, size)
        return TowerElement.constant(qq(other), self.size)

    def _resized(self, size: int) -> TowerElement:
        return self if self.size == size else TowerElement(self.coeffs, size)

    def __add__(self, other: Rat | TowerElement) -> TowerElement:
        other = self._with(other)
        size = max(self.size, other.size)
        out = dict(self.coeffs)
        for key, val in other.coeffs:
            out[key] = out.get(key, qq(0)) + val
        return TowerElement.from_dict(out, size)

    __radd__ = __add__

    def __neg__(self) -> TowerElement:
        return TowerElement(tuple((k, -v) for k, v in self.coeffs), self.size)

    def __sub__(self, other: Rat | TowerElement) -> TowerElement:
        return self + (-self._with(other))

    def __rsub__(self, other: Rat | TowerElement) -> TowerElement:
        return self._with(other) + (-self)

    def __mul__(self, other: Rat | TowerElement) -> TowerElement:
        other = self._with(other)
        size = max(self.size, other.size)
        out: dict[tuple[int, ...], QQ] = {}
        for k1, v1 in self.coeffs:
            for k2, v2 in other.coeffs:
                n = max(len(k1), len(k2))
                key = tuple(
                    (k1[i] if i < len(k1) else 0) + (k2[i] if i < len(k2) else 0)
                    for i in range(n)
                )
                out[key] = out.get(key, qq(0)) + v1 * v2
        return TowerElement.from_dict(out, size)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TowerElement:
        if n < 0:
            raise ValueError("negative powers of tower elements are not defined")
        result = TowerElement.constant(1, self.size)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, QQ)) or type(other).__name__ in ("mpq", "Fraction"):
            other = TowerElement.constant(qq(other), self.size)  # type: ignore[arg-type]
        if not isinstance(other, TowerElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return all(k == () for k, _ in self.coeffs)

    def constant_value(self) -> QQ:
        if not self.coeffs:
            return qq(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        return self.coeffs[0][1]

    def dominant(self) -> tuple[tuple[int, ...], QQ]:
        """The order-largest monomial and its coefficient.

        Raises ``ValueError`` on the zero element.
        """
        if not self.coeffs:
            raise ValueError("zero element has no dominant monomial")
        width = max(len(k) for k, _ in self.coeffs)
        return min(self.coeffs, key=lambda kv: _revkey(kv[0], width))

    def sign(self) -> int:
        """Exact sign in the ordered tower extension of QQ."""
        if not self.coeffs:
            return 0
        return qq_sign(self.dominant()[1])

    def degree(self, i: int) -> int:
        """Largest exponent of ``eps_i`` appearing."""
        return max((k[i] for k, _ in self.coeffs if len(k) > i), default=0)

    # -- instantiation ---------------------------------------------------

    def instantiate(self, assignment: Iterable[Rat]) -> QQ:
        """Evaluate at positive rational values for ``eps0 .. eps_{size-1}``."""
        values = [qq(v) for v in assignment]
        if len(values) != self.size:
            raise InstantiationError(
                f"assignment has {len(values)} values, tower size is {self.size}"
            )
        if any(v <= 0 for v in values):
            raise InstantiationError("tower values must be positive")
        total = qq(0)
        for key, coeff in self.coeffs:
            term = coeff
            for i, e in enumerate(key):
                if e:
                    term = term * values[i] ** e
            total += term
        return total

    # -- printing --------------------------------------------------------

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        width = max(len(k) for k, _ in self.coeffs)
        for key, coeff in sorted(self.coeffs, key=lambda kv: _revkey(kv[0], width)):
            factors = []
            if coeff == -1 and key:
                head = "-"
            elif coeff == 1 and key:
                head = ""
            else:
                head = str(coeff)
                if key:
                    head += "*"
            for i, e in enumerate(key):
                if e == 1:
                    factors.append(f"eps{i}")
                elif e > 1:
                    factors.append(f"eps{i}^{e}")
            parts.append(head + "*".join(factors))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"TowerElement({self})"


def tower_eps(i: int, size: int | None = None) -> TowerElement:
    """The tower variable ``eps_i`` (over a tower of ``size`` variables)."""
    if i < 0:
        raise ValueError("tower index must be nonnegative")
    if size is None:
        size = i + 1
    if size <= i:
        raise ValueError(f"tower size {size} does not include eps{i}")
    key = tuple([0] * i + [1])
    return TowerElement(((key, qq(1)),), size)


def tower_sign(x: Rat | TowerElement) -> int:
    """Sign of a rational or tower element."""
    if isinstance(x, TowerElement):
        return x.sign()
    return qq_sign(x)


def geometric_assignment(size: int, eta: Rat, base: int = 3) -> list[QQ]:
    """The schedule ``eps_i = eta ** (base ** i)`` for ``i < size``.

    ``eta`` must lie strictly between 0 and 1 so the values decrease and
    each is positive.
    """
    eta = qq(eta)
    if not (0 < eta < 1):
        raise InstantiationError(f"eta must lie in (0, 1), got {eta}")
    if base < 2:
        raise InstantiationError("exponent base must be at least 2")
    return [eta ** (base**i) for i in range(size)]
