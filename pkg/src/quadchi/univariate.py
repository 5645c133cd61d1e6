"""Dense univariate polynomial arithmetic and exact real-root isolation.

Polynomials are lists of coefficients in *ascending* degree order
(``[c0, c1, ..., cn]`` represents ``c0 + c1*x + ... + cn*x**n``) with no
trailing zeros; the empty list is the zero polynomial.  The isolation core
works over the integers (primitive polynomials); rational input is cleared
of denominators first, which changes no signs or roots.

Root isolation is Descartes-rule bisection in the Vincent-Collins-Akritas
style: the number of sign variations of the Mobius-transformed polynomial
``(x+1)^n p(1/(x+1))`` bounds the number of roots in (0, 1) and equals it
when 0 or 1, so repeated interval halving (with exact integer Taylor shifts
and dyadic scalings) terminates with isolating intervals for the distinct
real roots.  Sturm chains are kept alongside for interval root *counting*,
which other modules need independently of isolation.
"""

from __future__ import annotations

from .scalars import QQ, qq, qq_sign

__all__ = [
    "trim",
    "degree",
    "leading",
    "eval_at",
    "eval_sign",
    "add",
    "sub",
    "neg",
    "mul",
    "mul_scalar",
    "derivative",
    "content",
    "primitive",
    "clear_denoms",
    "pseudo_rem",
    "gcd",
    "exact_div",
    "squarefree_part",
    "sign_variations",
    "sturm_chain",
    "sturm_count",
    "cauchy_bound",
    "isolate",
    "refine",
    "rational_roots",
]


def trim(p: list) -> list:
    """Drop trailing zero coefficients (canonical form)."""
    n = len(p)
    while n and p[n - 1] == 0:
        n -= 1
    return p[:n]


def degree(p: list) -> int:
    """Degree; -1 for the zero polynomial."""
    return len(p) - 1


def leading(p: list):
    if not p:
        raise ValueError("zero polynomial has no leading coefficient")
    return p[-1]


def eval_at(p: list, x):
    """Horner evaluation (exact, any rational-like scalar)."""
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def eval_sign(p: list, x) -> int:
    return qq_sign(eval_at(p, x))


def add(p: list, q: list) -> list:
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return trim(out)


def neg(p: list) -> list:
    return [-c for c in p]


def sub(p: list, q: list) -> list:
    return add(p, neg(q))


def mul(p: list, q: list) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def mul_scalar(p: list, c) -> list:
    if c == 0:
        return []
    return [a * c for a in p]


def derivative(p: list) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def _igcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def content(p: list) -> int:
    """GCD of integer coefficients (0 for the zero polynomial)."""
    g = 0
    for c in p:
        g = _igcd(g, int(c))
        if g == 1:
            return 1
    return g


def primitive(p: list) -> list:
    """Divide out the integer content (sign preserved)."""
    g = content(p)
    if g in (0, 1):
        return list(p)
    return [int(c) // g for c in p]


def clear_denoms(p: list) -> list:
    """Scale a rational-coefficient polynomial to primitive integers.

    The scale factor is positive, so signs and roots are unchanged.
    """
    if not p:
        return []
    lcm = 1
    for c in p:
        c = qq(c)
        d = int(c.denominator)
        lcm = lcm // _igcd(lcm, d) * d
    return primitive([int(qq(c) * lcm) for c in p])


def pseudo_rem(p: list, q: list) -> list:
    """Pseudo-remainder: ``lc(q)^(dp-dq+1) * p mod q`` (integer-exact).

    Every elimination step scales uniformly by ``lc(q)``, so the overall
    multiplier is exactly ``lc(q)**(dp-dq+1)`` — callers rely on knowing
    its parity to keep signs straight.
    """
    if not q:
        raise ZeroDivisionError("pseudo-division by zero polynomial")
    p, q = trim(p), trim(q)
    dp, dq = degree(p), degree(q)
    if dp < dq:
        return list(p)
    lc = q[-1]
    r = list(p)
    for k in range(dp - dq, -1, -1):
        c = r[dq + k]
        r = [lc * ri for ri in r]
        if c:
            for j in range(dq + 1):
                r[j + k] -= c * q[j]
    r = trim(r)
    assert degree(r) < dq
    return r


def gcd(p: list, q: list) -> list:
    """Primitive GCD over the integers (primitive PRS), positive leading."""
    p, q = primitive(trim(p)), primitive(trim(q))
    if not p:
        g = q
    elif not q:
        g = p
    else:
        while q:
            r = primitive(pseudo_rem(p, q))
            p, q = q, r
        g = p
    if g and g[-1] < 0:
        g = neg(g)
    return g


def exact_div(p: list, q: list) -> list:
    """Exact polynomial division (raises if the division is not exact)."""
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    if not p:
        return []
    dp, dq = degree(p), degree(q)
    if dp < dq:
        raise ValueError("division is not exact")
    r = [qq(c) for c in p]
    lc = qq(q[-1])
    out = [qq(0)] * (dp - dq + 1)
    for k in range(dp - dq, -1, -1):
        c = r[dq + k] / lc
        out[k] = c
        if c:
            for j in range(dq + 1):
                r[j + k] -= c * qq(q[j])
    if any(c != 0 for c in r[:dq]):
        raise ValueError("division is not exact")
    if all(qq(c).denominator == 1 for c in out):
        return trim([int(c) for c in out])
    return trim(out)


def squarefree_part(p: list) -> list:
    """The radical (product of distinct irreducible factors), primitive."""
    p = primitive(trim(p))
    if degree(p) <= 0:
        return p
    g = gcd(p, derivative(p))
    if degree(g) == 0:
        return p
    return primitive(clear_denoms(exact_div(p, g)))


def sign_variations(seq) -> int:
    """Sign variations of a numeric sequence, zeros discarded."""
    signs = [qq_sign(c) for c in seq if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_chain(p: list) -> list[list]:
    """Sturm chain of ``p`` (integer, content-stripped negated remainders)."""
    p = primitive(trim(p))
    chain = [p]
    q = primitive(derivative(p))
    while q:
        chain.append(q)
        r = pseudo_rem(chain[-2], q)
        # pseudo_rem multiplies by lc(q)^(delta+1); an odd power can flip the
        # sign, which a Sturm chain cannot tolerate, so correct it.
        delta = degree(chain[-2]) - degree(q)
        if leading(q) < 0 and (delta + 1) % 2 == 1:
            r = neg(r)
        q = primitive(neg(r))
    return chain


def sturm_count(chain: list[list], a, b) -> int:
    """Number of distinct real roots of ``chain[0]`` in the open interval (a, b).

    Requires ``a < b`` and neither endpoint a root of ``chain[0]``.
    """
    if not a < b:
        raise ValueError("empty interval")
    va = sign_variations([eval_at(p, a) for p in chain])
    vb = sign_variations([eval_at(p, b) for p in chain])
    if eval_at(chain[0], a) == 0 or eval_at(chain[0], b) == 0:
        raise ValueError("Sturm count requires non-root endpoints")
    return va - vb


def cauchy_bound(p: list) -> QQ:
    """A strict bound M: every real root lies in (-M, M)."""
    p = trim(p)
    if degree(p) < 1:
        return qq(1)
    lc = abs(qq(p[-1]))
    m = max(abs(qq(c)) for c in p[:-1])
    return 1 + m / lc


def _taylor_shift_1(p: list) -> list:
    """p(x + 1) by iterated synthetic addition (integer-exact)."""
    out = list(p)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += out[j + 1]
    return trim(out)


def _scale_half(p: list) -> list:
    """2^n * p(x/2), integer coefficients, primitive-stripped."""
    n = degree(p)
    return primitive([c * (1 << (n - i)) for i, c in enumerate(p)])


def _transform_01(p: list) -> list:
    """(x+1)^n * p(1/(x+1)): sign variations bound the roots of p in (0,1)."""
    return _taylor_shift_1(list(reversed(trim(p))))


def _isolate_01(p: list, a: QQ, b: QQ, out: list) -> None:
    """Isolate roots of the squarefree integer ``p`` pulled back to (0, 1).

    ``p``'s roots in (0, 1) correspond to the target interval (a, b); this
    appends isolating subintervals (or exact dyadic roots) to ``out``.
    Iterative with an explicit stack: subdivision can go deep when roots
    cluster.
    """
    stack = [(p, a, b)]
    while stack:
        p, a, b = stack.pop()
        v = sign_variations(_transform_01(p))
        if v == 0:
            continue
        # Emit only when the cell's endpoints are themselves non-roots; a
        # left branch inherits an exact subdivision root on its right edge
        # (the strip below removes it from the right branch only), and such
        # a cell must be subdivided until the interior root separates.
        if v == 1 and eval_at(p, qq(1)) != 0:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        left = _scale_half(p)  # roots in (0, 1/2) -> roots of left in (0, 1)
        right = _taylor_shift_1(left)  # roots in (1/2, 1) -> right in (0, 1)
        if right and right[0] == 0:
            out.append((mid, mid))
            right = trim(right[1:])
        stack.append((left, a, mid))
        stack.append((right, mid, b))


def isolate(p: list) -> list[tuple[QQ, QQ]]:
    """Isolating intervals for the distinct real roots of ``p``.

    Parameters
    ----------
    p : list
        Nonzero polynomial with integer or rational coefficients.

    Returns
    -------
    list of ``(a, b)`` pairs, sorted and pairwise disjoint.  ``a == b``
    marks an exact rational root; otherwise the open interval (a, b)
    contains exactly one distinct real root of ``p`` and its endpoints are
    not roots.

    Examples
    --------
    >>> isolate([-2, 0, 1])  # x^2 - 2
    [(-2, -1), (1, 2)]
    >>> isolate([0, -1, 0, 1])  # x^3 - x
    [(-1, -1), (0, 0), (1, 1)]
    """
    p = clear_denoms(trim(p))
    if not p:
        raise ValueError("cannot isolate roots of the zero polynomial")
    if degree(p) == 0:
        return []
    full_sf = squarefree_part(p)
    p = full_sf
    roots: list[tuple[QQ, QQ]] = []
    if p[0] == 0:
        roots.append((qq(0), qq(0)))
        i = 0
        while p[i] == 0:
            i += 1
        p = p[i:]
    if degree(trim(p)) >= 1:
        bound = cauchy_bound(p)
        b = qq(1)
        while b < bound:
            b *= 2
        # positive roots: q(x) = p(b*x) has them pulled into (0, 1)
        pos: list[tuple[QQ, QQ]] = []
        scaled = primitive(clear_denoms([c * b**i for i, c in enumerate(p)]))
        _isolate_01(scaled, qq(0), qq(1), pos)
        neg_p = [(-1) ** i * c for i, c in enumerate(scaled)]
        negs: list[tuple[QQ, QQ]] = []
        _isolate_01(neg_p, qq(0), qq(1), negs)
        for lo, hi in negs:
            roots.append((-hi * b, -lo * b))
        for lo, hi in pos:
            roots.append((lo * b, hi * b))
    roots.sort()
    # Shrink any open interval with a root of the input sitting exactly on
    # an endpoint (the stripped zero root, or an exact dyadic root on a
    # neighboring subdivision line).  Such endpoints are always known exact
    # roots, so bisecting with those roots deflated out keeps the endpoint
    # signs nonzero and the unique interior root bracketed.
    q = trim(p)
    for lo, hi in roots:
        if lo == hi and lo != 0 and degree(q) >= 1 and eval_at(q, lo) == 0:
            q = _deflate(q, lo)
    cleaned: list[tuple[QQ, QQ]] = []
    for lo, hi in roots:
        while lo < hi and (eval_at(full_sf, lo) == 0 or eval_at(full_sf, hi) == 0):
            lo, hi = _bisect_once(q, lo, hi)
        cleaned.append((lo, hi))
    return cleaned


def _deflate(p: list, t: QQ) -> list:
    """Exact division of ``p`` by ``(x - t)`` for a known root ``t``."""
    n = degree(p)
    quot = [qq(0)] * n
    carry = qq(p[n])
    for i in range(n - 1, -1, -1):
        quot[i] = carry
        carry = qq(p[i]) + t * carry
    if carry != 0:
        raise ValueError("deflation point is not a root")
    return quot


def _bisect_once(p: list, lo: QQ, hi: QQ) -> tuple[QQ, QQ]:
    """One refinement step for an interval with a single sign-change root."""
    mid = (lo + hi) / 2
    s = eval_sign(p, mid)
    if s == 0:
        return (mid, mid)
    if s == eval_sign(p, lo):
        return (mid, hi)
    return (lo, mid)


def refine(p: list, lo: QQ, hi: QQ, width: QQ) -> tuple[QQ, QQ]:
    """Shrink an isolating interval of ``p`` below ``width`` by bisection.

    ``(lo, hi)`` must isolate a single sign-change root (e.g. produced by
    :func:`isolate` on a squarefree polynomial); exact roots pass through.
    """
    if lo == hi:
        return (lo, hi)
    if eval_sign(p, lo) * eval_sign(p, hi) >= 0:
        raise ValueError("interval does not bracket a sign change")
    while hi - lo >= width:
        lo, hi = _bisect_once(p, lo, hi)
        if lo == hi:
            break
    return (lo, hi)


def rational_roots(p: list, limit: int = 10**6) -> list[QQ]:
    """All rational roots, via trial division of divisor candidates.

    Skipped (returns []) when the relevant coefficients exceed ``limit`` in
    absolute value, since divisor enumeration would be too slow; callers
    treat the result as "roots found", not "all roots are irrational".
    """
    p = clear_denoms(trim(p))
    if not p or degree(p) == 0:
        return []
    out = []
    if p[0] == 0:
        out.append(qq(0))
        while p[0] == 0:
            p = p[1:]
    p = squarefree_part(trim(p))
    if degree(p) < 1:
        return sorted(out)
    a0, an = abs(p[0]), abs(p[-1])
    if a0 > limit or an > limit:
        return sorted(out)
    def divisors(n: int) -> list[int]:
        ds = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                ds.append(d)
                ds.append(n // d)
            d += 1
        return ds
    for num in divisors(a0):
        for den in divisors(an):
            for cand in (qq(num, den), qq(-num, den)):
                if eval_at(p, cand) == 0 and cand not in out:
                    out.append(cand)
    return sorted(out)
