"""Euler characteristics of sets quadratic in a distinguished block.

The sets handled here are cut out by polynomials at most quadratic in the
Y-variables, with arbitrary (bounded-degree) dependence on the X-variables.
Four routines cover the four shapes such a description can take, each
reducing to the previous one:

``chi_union_homogeneous``
    The seed computation.  For Y-homogeneous quadratic ``Q_1 .. Q_m`` and a
    bounded parameter-side set ``V``, it computes the characteristic of the
    union of the sets ``{|y| = 1, Q_i <= 0}`` over ``V``.  The union is the
    image of the set of pairs ``(z, y)`` with ``z`` a nonpositive convex
    weight vector and ``<z, Q>(y) <= 0``; projecting instead onto ``z``
    turns the computation into linear algebra.  Over a weight vector ``z``
    (and parameter point ``x``) the fiber is the part of the unit sphere
    where one quadratic form -- the ``z``-combination of the family, with
    matrix ``M(z, x)`` -- is nonpositive, and that part is homotopy
    equivalent to a sphere of dimension ``ell - n``, where ``n`` is the
    number of negative eigenvalues of ``M(z, x)``.  So the answer is a sum,
    over the sign conditions ``rho`` on the characteristic-polynomial
    coefficients of ``M``, of ``chi_BM(rho) * (1 + (-1)``^``(ell - n))``,
    and the only geometry left is a cylindrical decomposition in the
    ``(z, x)``-space, whose dimension does not involve ``ell``.

``chi_intersection_homogeneous``
    The intersection of the same sets, by inclusion-exclusion over the
    ``2^m - 1`` nonempty subfamilies, each handled by the union routine.
    With no members at all the set is the whole sphere over ``V``.

``chi_intersection``
    The affine case ``{Q_1 <= 0, .., Q_m <= 0}`` over ``V``.  Adjoining
    the ball constraint ``eps^2 |y|^2 - 1 <= 0`` and homogenizing each
    member with a fresh variable ``Y0`` produces a set that is an exact
    double cover of the original (the ball forces ``Y0 != 0``, leaving one
    copy for each sign of ``Y0``), so the affine characteristic is half
    the homogeneous one -- and the evenness of the homogeneous value is a
    built-in consistency check.  When some X-free member already has
    positive-definite pure quadratic part, the ``Y0 = 0`` locus is empty
    without any ball and the deformation scale is skipped entirely.

``chi_general``
    An arbitrary nonstrict formula over the two families.  Every such set
    is an integer combination of basic closed pieces: for each way
    ``rho`` of pinning the members to one of the five generalized signs
    ``{= 0, >= eps, <= -eps, = eps, = -eps}``, the pinned piece (clipped
    to large Y- and X-balls) is basic closed, and the inclusion-exclusion
    signs are ``(-1)``^``(number of pinned-to-"= +-eps" members)``.

The deformation scales are executed as concrete rationals on a steep
geometric schedule, re-run at a halved base scale until two consecutive
runs agree; symbolic scales in the input must be instantiated up front.
Every routine returns an :class:`EpcResult` carrying a trace of its own
aggregation, re-checkable via :meth:`EpcResult.recheck`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cad import Decomposition, cylindrical_decomposition
from .formulas import (
    And,
    Atom,
    FALSE,
    Formula,
    GENERALIZED_CODES,
    Or,
    Rel,
    System,
    evaluate,
    membership_disjunct,
    polys_of,
)
from .polynomials import (
    Polynomial,
    char_poly,
    constant,
    homogenize_in_y,
    pencil_matrix,
    quadratic_form_matrix,
    variable,
)
from .scalars import QQ, Rat, geometric_assignment, qq

__all__ = [
    "DEFAULT_ETA",
    "DEFAULT_REFINE_BUDGET",
    "PROBE_RADIUS",
    "EpcError",
    "EpsilonInstabilityError",
    "EpcResult",
    "index_sign_sequence",
    "index_from_signs",
    "chi_union_homogeneous",
    "chi_intersection_homogeneous",
    "chi_intersection",
    "chi_general",
    "betti_bound_report",
]

DEFAULT_ETA: QQ = qq(1, 2**10)
DEFAULT_REFINE_BUDGET = 6
PROBE_RADIUS: QQ = qq(2**20)

_MODELS = ("simplex", "sphere")
_FIBER_EXPONENTS = ("ell", "paper-k")


class EpcError(Exception):
    """A precondition of one of the characteristic routines is violated."""


class EpsilonInstabilityError(EpcError):
    """No two consecutive deformation scales produced the same value."""


# ---------------------------------------------------------------------------
# Negative-eigenvalue counting from characteristic coefficients.
# ---------------------------------------------------------------------------


def index_sign_sequence(c_signs: Sequence[int]) -> tuple[int, ...]:
    """The alternating sign sequence whose variations count negatives.

    ``c_signs`` lists the signs of the ascending coefficients ``C_0 ..
    C_{n-1}`` of the monic characteristic polynomial of a symmetric n-by-n
    matrix ``M``.  Entry ``i`` of the result is ``(-1)**(n-i) *
    c_signs[i]``, with a final ``+1`` for the monic leading coefficient:
    these are exactly the coefficient signs of the characteristic
    polynomial of ``-M``, whose positive roots are the negated negative
    eigenvalues of ``M``.  Descartes' rule of signs is exact (not just an
    upper bound) on real-rooted polynomials, so the variation count of
    the sequence is the number of negative eigenvalues.

    Examples
    --------
    >>> index_sign_sequence([1, -1])   # diag(1, 2): C0 = 2, C1 = -3
    (1, 1, 1)
    >>> index_sign_sequence([1, 1])    # diag(-1, -2): C0 = 2, C1 = 3
    (1, -1, 1)
    >>> index_sign_sequence([-1, -1])  # diag(-1, 3): C0 = -3, C1 = -2
    (-1, 1, 1)
    """
    n = len(c_signs)
    out = []
    for i, s in enumerate(c_signs):
        if s not in (-1, 0, 1):
            raise ValueError(f"sign entries must be -1, 0 or 1, got {s}")
        out.append(s if (n - i) % 2 == 0 else -s)
    out.append(1)
    return tuple(out)


def index_from_signs(seq: Sequence[int]) -> int:
    """Sign variations of an index sequence, zeros dropped.

    For a sequence produced by :func:`index_sign_sequence` this equals the
    count of negative eigenvalues of the underlying symmetric matrix.

    Examples
    --------
    >>> index_from_signs((1, 1, 1))
    0
    >>> index_from_signs((1, -1, 1))
    2
    >>> index_from_signs((-1, 1, 1))
    1
    """
    if not seq or seq[-1] != 1:
        raise ValueError("an index sequence ends with +1 (monic leading term)")
    nonzero = [s for s in seq if s != 0]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)


# ---------------------------------------------------------------------------
# Results and shared helpers.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpcResult:
    """A characteristic together with the aggregation that produced it.

    ``trace`` is a plain-data record (strings, integers, lists, dicts)
    of every sub-computation: sign conditions with their cell sums and
    fiber weights, inclusion-exclusion subsets with their values, and the
    deformation scales actually used.  The headline value is redundant
    given the trace, which is the point: :meth:`recheck` re-aggregates
    the trace from scratch and confirms it reproduces ``chi``.
    """

    chi: int
    trace: dict = field(repr=False)

    def recheck(self) -> bool:
        """Re-derive ``chi`` from the recorded trace entries."""
        return _recheck_trace(self.chi, self.trace)


def _recheck_trace(chi: int, trace: Mapping) -> bool:
    algorithm = trace["algorithm"]
    if algorithm == "union-h":
        fast = trace.get("fast_path")
        if fast is not None:
            return chi == fast["sphere_factor"] * fast["chi_v"]
        return chi == sum(r["chi_bm"] * r["weight"] for r in trace["rows"])
    if algorithm == "intersection-h":
        fast = trace.get("fast_path")
        if fast is not None:
            return chi == fast["sphere_factor"] * fast["chi_v"]
        total = 0
        for row in trace["subsets"]:
            if not _recheck_trace(row["chi"], row["union"]):
                return False
            total += row["sign"] * row["chi"]
        return chi == total
    if algorithm == "intersection":
        attempts = trace["attempts"]
        for a in attempts:
            if a["chi_h"] != 2 * a["chi"]:
                return False
            if not _recheck_trace(a["chi_h"], a["homogeneous"]):
                return False
        if len(attempts) >= 2 and attempts[-1]["chi"] != attempts[-2]["chi"]:
            return False
        return chi == attempts[-1]["chi"]
    if algorithm == "general":
        attempts = trace["attempts"]
        for a in attempts:
            total = 0
            for row in a["rows"]:
                if not row["skipped"]:
                    total += (-1) ** row["doubled"] * row["chi"]
            if a["chi"] != total:
                return False
        if len(attempts) >= 2 and attempts[-1]["chi"] != attempts[-2]["chi"]:
            return False
        return chi == attempts[-1]["chi"]
    raise ValueError(f"unknown trace algorithm {algorithm!r}")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise EpcError(message)


def _check_knobs(model: str, fiber_exponent: str) -> None:
    if model not in _MODELS:
        raise EpcError(f"unknown weight-space model {model!r}; expected one of {_MODELS}")
    if fiber_exponent not in _FIBER_EXPONENTS:
        raise EpcError(
            f"unknown fiber exponent rule {fiber_exponent!r}; "
            f"expected one of {_FIBER_EXPONENTS}"
        )


def _instantiated(
    system: System, instantiation: Sequence[Rat] | None
) -> tuple[System, list[str]]:
    """Replace symbolic deformation scales by the provided rationals."""
    size = system.tower_size()
    if size == 0:
        return system, []
    if instantiation is None:
        raise EpcError(
            "the system carries symbolic deformation scales; "
            "provide an instantiation (one positive rational per scale)"
        )
    values = [qq(v) for v in instantiation]
    if len(values) < size:
        raise EpcError(
            f"instantiation provides {len(values)} values, the system uses {size}"
        )
    fixed = System(
        ell=system.ell,
        k=system.k,
        q_family=tuple(p.instantiate_tower(values) for p in system.q_family),
        p_family=tuple(p.instantiate_tower(values) for p in system.p_family),
        formula=_map_formula_polys(system.formula, values),
        homogeneous=system.homogeneous,
    )
    fixed.validate()
    return fixed, [str(v) for v in values]


def _map_formula_polys(f: Formula, values: list[QQ]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.poly.instantiate_tower(values), f.rel)
    if isinstance(f, And):
        return And(tuple(_map_formula_polys(c, values) for c in f.children))
    return Or(tuple(_map_formula_polys(c, values) for c in f.children))


def _parameter_side(system: System) -> Formula:
    """The system's formula, checked to constrain only the parameter side."""
    allowed = {p.key() for p in system.p_family}
    for poly in polys_of(system.formula):
        if poly.key() not in allowed:
            raise EpcError(
                "this routine fixes the quadratic-side shape itself; the "
                "system formula may constrain only the parameter-side "
                f"family (offending polynomial: {poly})"
            )
    return system.formula


def _formula_key(f: Formula) -> tuple:
    if isinstance(f, Atom):
        return ("atom", f.poly.key(), f.rel.name)
    tag = "and" if isinstance(f, And) else "or"
    return (tag,) + tuple(_formula_key(c) for c in f.children)


def _signs_by_key(dec: Decomposition) -> tuple[dict[tuple, int], list[dict[tuple, int]]]:
    key_index = {p.key(): i for i, p in enumerate(dec.input_polys)}
    per_cell = [
        {k: cell.signs[i] for k, i in key_index.items()} for cell in dec.cells
    ]
    return key_index, per_cell


def _dedup(polys: Sequence[Polynomial]) -> list[Polynomial]:
    return list({p.key(): p for p in polys}.values())


def _assert_parameter_side_bounded(phi: Formula, x_vars: Sequence[str]) -> None:
    """Reject parameter-side sets with points outside the probe ball.

    A decomposition adapted to the formula's polynomials plus the ball
    polynomial ``|x|^2 - R^2`` is sign-invariant on each cell for all of
    them, so an unbounded satisfying set must own a satisfying cell on
    which the ball polynomial is nonnegative.  The converse direction is
    deliberately conservative: a bounded set reaching past the probe
    radius is also rejected.
    """
    clip = constant(-(PROBE_RADIUS**2))
    for v in x_vars:
        clip = clip + variable(v) * variable(v)
    inputs = _dedup(list(polys_of(phi)) + [clip])
    dec = cylindrical_decomposition(inputs, x_vars, gate=phi)
    _, assignments = _signs_by_key(dec)
    for cell_signs in assignments:
        if evaluate(phi, cell_signs) and cell_signs[clip.key()] >= 0:
            raise EpcError(
                "the parameter-side set is unbounded (or reaches beyond "
                f"the probe radius {PROBE_RADIUS}); the homogeneous "
                "routines require a bounded parameter-side set"
            )


def _chi_parameter_side(phi: Formula, x_vars: Sequence[str]) -> int:
    """Characteristic of the (closed, bounded) parameter-side set."""
    dec = cylindrical_decomposition(_dedup(polys_of(phi)), x_vars, gate=phi)
    return dec.chi_bm_of_formula(phi)


# ---------------------------------------------------------------------------
# Union of homogeneous-quadric caps over a parameter-side set.
# ---------------------------------------------------------------------------


def chi_union_homogeneous(
    system: System,
    instantiation: Sequence[Rat] | None = None,
    *,
    model: str = "simplex",
    fiber_exponent: str = "ell",
    bound_probe: bool = True,
) -> EpcResult:
    """Characteristic of ``union_i {|y| = 1, Q_i <= 0}`` over the formula's set.

    Parameters
    ----------
    system:
        A homogeneous system; the formula may constrain only the
        parameter-side family and must define a bounded set.
    instantiation:
        Positive rationals for any symbolic deformation scales appearing
        in the system (required exactly when some appear).
    model:
        ``"simplex"`` (default) evaluates the weight-space aggregation on
        the standard simplex of nonpositive weights summing to ``-1``,
        eliminating one variable; ``"sphere"`` uses the nonpositive part
        of the unit sphere literally.  The tracked coefficients are
        homogeneous in the weights, so every ray meets both models in
        matching sign conditions and the two agree.
    fiber_exponent:
        The sphere-fiber dimension rule.  ``"ell"`` (default) weights a
        sign condition of index ``n`` by ``1 + (-1)**(ell - n)``, the
        characteristic of the sphere of dimension ``ell - n`` the fiber
        retracts to.  ``"paper-k"`` substitutes ``k`` for ``ell`` -- a
        published variant reproduced for comparison; it disagrees with
        direct computation whenever ``ell - k`` is odd.
    bound_probe:
        Verify (by decomposition) that the parameter-side set stays inside
        the probe ball before trusting the aggregation.

    Returns
    -------
    EpcResult
        The characteristic plus one trace row per realized sign condition
        on the characteristic coefficients.
    """
    _check_knobs(model, fiber_exponent)
    _require(system.homogeneous, "the union routine requires a homogeneous system")
    system, inst = _instantiated(system, instantiation)
    phi = _parameter_side(system)
    ell, k, m = system.ell, system.k, system.m
    trace: dict = {
        "algorithm": "union-h",
        "model": model,
        "fiber_exponent": fiber_exponent,
        "ell": ell,
        "k": k,
        "m": m,
        "instantiation": inst,
        "bound_probe": "off",
        "rows": [],
        "chi": 0,
    }
    if m == 0:
        # A union over no members is empty.
        trace["bound_probe"] = "skipped"
        return EpcResult(0, trace)
    if bound_probe:
        if k > 0:
            _assert_parameter_side_bounded(phi, system.x_vars())
            trace["bound_probe"] = "passed"
        else:
            trace["bound_probe"] = "skipped"
    family = list(system.q_family)
    if fiber_exponent == "ell":
        # Exact member screening before any decomposition.  A strictly
        # positive-definite member meets the unit sphere nowhere and drops
        # out of the union.  A strictly negative-definite member -- or two
        # members summing to zero, whose caps jointly exhaust the sphere --
        # covers everything, so the union is the full sphere bundle over
        # the parameter-side set and its characteristic is a product.  The
        # published-variant exponent rule aggregates the family verbatim
        # instead, since its purpose is to reproduce that aggregation.
        survivors: list[Polynomial] = []
        seen_keys: set = set()
        dropped = 0
        cover = None
        for q in family:
            cls = _homogeneous_definiteness(q, ell)
            if cls == "posdef":
                dropped += 1
                continue
            if cls == "negdef":
                cover = "negative-definite member"
                break
            if (constant(-1) * q).key() in seen_keys:
                cover = "antipodal pair"
                break
            seen_keys.add(q.key())
            survivors.append(q)
        if dropped:
            trace["dropped_members"] = dropped
        if cover is not None:
            sphere_factor = 2 if ell % 2 == 0 else 0
            chi_v = _chi_parameter_side(phi, system.x_vars())
            total = sphere_factor * chi_v
            trace["fast_path"] = {
                "reason": cover,
                "chi_v": chi_v,
                "sphere_factor": sphere_factor,
            }
            trace["chi"] = total
            return EpcResult(total, trace)
        if not survivors:
            return EpcResult(0, trace)
        family = survivors
        m = len(family)
    tracked = char_poly(pencil_matrix(family, ell))[: ell + 1]
    region_atoms: list[Formula]
    if model == "simplex":
        if m == 1:
            substitution: dict[str, Polynomial | QQ] = {"Z1": qq(-1)}
            z_vars: list[str] = []
            region_atoms = []
        else:
            last = constant(-1)
            for j in range(1, m):
                last = last - variable(f"Z{j}")
            substitution = {f"Z{m}": last}
            z_vars = [f"Z{j}" for j in range(1, m)]
            region_atoms = [
                Atom(variable(f"Z{j}"), Rel.LE) for j in range(1, m)
            ] + [Atom(last, Rel.LE)]
        tracked = [c.substitute(substitution) for c in tracked]
    else:
        z_vars = [f"Z{j}" for j in range(1, m + 1)]
        z_sphere = constant(-1)
        for v in z_vars:
            z_sphere = z_sphere + variable(v) * variable(v)
        region_atoms = [Atom(z_sphere, Rel.EQ)] + [
            Atom(variable(v), Rel.LE) for v in z_vars
        ]
    gate = And(tuple(region_atoms) + (phi,))
    inputs = _dedup(
        tracked + [a.poly for a in region_atoms if isinstance(a, Atom)] + polys_of(phi)
    )
    dec = cylindrical_decomposition(inputs, z_vars + system.x_vars(), gate=gate)
    _, assignments = _signs_by_key(dec)
    tracked_keys = [c.key() for c in tracked]
    by_condition: dict[tuple[int, ...], int] = {}
    for cell, cell_signs in zip(dec.cells, assignments):
        if not evaluate(gate, cell_signs):
            continue
        condition = tuple(cell_signs[k_] for k_ in tracked_keys)
        by_condition[condition] = by_condition.get(condition, 0) + cell.chi_bm()
    total = 0
    for condition in sorted(by_condition):
        index = index_from_signs(index_sign_sequence(condition))
        exponent = (ell - index) if fiber_exponent == "ell" else (k - index)
        weight = 2 if exponent % 2 == 0 else 0
        total += by_condition[condition] * weight
        trace["rows"].append(
            {
                "condition": list(condition),
                "chi_bm": by_condition[condition],
                "index": index,
                "weight": weight,
            }
        )
    trace["chi"] = total
    return EpcResult(total, trace)


# ---------------------------------------------------------------------------
# Intersection of homogeneous-quadric caps: inclusion-exclusion.
# ---------------------------------------------------------------------------


def chi_intersection_homogeneous(
    system: System,
    instantiation: Sequence[Rat] | None = None,
    *,
    model: str = "simplex",
    fiber_exponent: str = "ell",
    bound_probe: bool = True,
    _memo: dict | None = None,
) -> EpcResult:
    """Characteristic of ``intersect_i {|y| = 1, Q_i <= 0}`` over the formula's set.

    Inclusion-exclusion over the nonempty subfamilies reduces everything
    to :func:`chi_union_homogeneous`; the per-subfamily values are
    memoized by (member set, formula), so duplicated members cost
    nothing extra.  With no members at all the set is the whole sphere
    bundle over the parameter-side set ``V`` and the value is
    ``(1 + (-1)**ell) * chi(V)`` directly.
    """
    _check_knobs(model, fiber_exponent)
    _require(
        system.homogeneous, "the intersection-h routine requires a homogeneous system"
    )
    system, inst = _instantiated(system, instantiation)
    phi = _parameter_side(system)
    ell, m = system.ell, system.m
    trace: dict = {
        "algorithm": "intersection-h",
        "ell": ell,
        "k": system.k,
        "m": m,
        "instantiation": inst,
        "bound_probe": "off",
        "chi": 0,
    }
    if bound_probe:
        if system.k > 0:
            _assert_parameter_side_bounded(phi, system.x_vars())
            trace["bound_probe"] = "passed"
        else:
            trace["bound_probe"] = "skipped"
    if m == 0:
        chi_v = _chi_parameter_side(phi, system.x_vars())
        factor = 2 if ell % 2 == 0 else 0
        chi = factor * chi_v
        trace["fast_path"] = {"chi_v": chi_v, "sphere_factor": factor}
        trace["chi"] = chi
        return EpcResult(chi, trace)
    memo = {} if _memo is None else _memo
    subsets: list[dict] = []
    total = 0
    indices = list(range(m))
    for size in range(1, m + 1):
        for members in _combinations(indices, size):
            subfamily = tuple(system.q_family[i] for i in members)
            key = (
                frozenset(q.key() for q in subfamily),
                _formula_key(phi),
                model,
                fiber_exponent,
            )
            if key not in memo:
                subsystem = System(
                    ell=ell,
                    k=system.k,
                    q_family=subfamily,
                    p_family=system.p_family,
                    formula=system.formula,
                    homogeneous=True,
                )
                memo[key] = chi_union_homogeneous(
                    subsystem,
                    model=model,
                    fiber_exponent=fiber_exponent,
                    bound_probe=False,
                )
            sub = memo[key]
            sign = 1 if size % 2 == 1 else -1
            total += sign * sub.chi
            subsets.append(
                {
                    "members": [i + 1 for i in members],
                    "sign": sign,
                    "chi": sub.chi,
                    "union": sub.trace,
                }
            )
    trace["subsets"] = subsets
    trace["chi"] = total
    return EpcResult(total, trace)


def _combinations(pool: list[int], size: int) -> list[tuple[int, ...]]:
    from itertools import combinations

    return list(combinations(pool, size))


# ---------------------------------------------------------------------------
# Affine intersections: homogenize against a deformation ball and halve.
# ---------------------------------------------------------------------------


def _definiteness(matrix: list[list[Polynomial]]) -> str | None:
    """Classify a constant symmetric matrix: ``"posdef"``, ``"negdef"`` or None.

    Strict definiteness only; singular and indefinite matrices both map to
    None.  The negative-eigenvalue count comes from the characteristic
    coefficient signs via :func:`index_from_signs`.
    """
    size = len(matrix)
    if size == 0:
        return None
    coeffs = char_poly(matrix)
    signs = [_constant_sign(c) for c in coeffs[:-1]]
    if signs[0] == 0:
        return None  # singular: some eigenvalue vanishes
    negatives = index_from_signs(index_sign_sequence(signs))
    if negatives == 0:
        return "posdef"
    if negatives == size:
        return "negdef"
    return None


def _homogeneous_definiteness(q: Polynomial, ell: int) -> str | None:
    """Definiteness of an X-free Y-homogeneous quadratic, else None."""
    if any(not v.startswith("Y") for v in q.variables()):
        return None
    return _definiteness(quadratic_form_matrix(q, ell))


def _definite_ball_member(q: Polynomial, ell: int) -> bool:
    """True when ``{q <= 0}`` is already bounded in Y uniformly in X.

    The test: ``q`` mentions no X-variable and the pure quadratic part of
    ``q`` in the Y-variables is positive definite.  Then the homogenized
    family restricted to ``Y0 = 0`` asks that part to be nonpositive on
    the unit sphere, which is impossible, so no deformation ball is
    needed to empty the locus at infinity.
    """
    if any(not v.startswith("Y") for v in q.variables()):
        return False
    matrix = quadratic_form_matrix(homogenize_in_y(q, ell), ell)
    block = [row[1:] for row in matrix[1:]]
    if not block:
        return False
    return _definiteness(block) == "posdef"


def _constant_sign(p: Polynomial) -> int:
    if p.is_zero():
        return 0
    return p.leading_sign()


def chi_intersection(
    system: System,
    *,
    eta: Rat = DEFAULT_ETA,
    refine_budget: int = DEFAULT_REFINE_BUDGET,
    model: str = "simplex",
    fiber_exponent: str = "ell",
    bound_probe: bool = True,
    _memo: dict | None = None,
) -> EpcResult:
    """Characteristic of the affine set ``{all Q_i <= 0}`` over the formula's set.

    The system must be affine (no ``Y0``); its formula may constrain only
    the parameter-side family, whose set must be bounded.  Each member is
    homogenized, the ball member ``scale^2 |y|^2 - 1`` is adjoined unless
    an X-free member with positive-definite quadratic part makes it
    redundant, and the homogeneous intersection value -- necessarily even
    -- is halved.  When the ball is needed, the computation runs at
    ``eta``, then at successively halved scales until two consecutive
    values agree; disagreement past ``refine_budget`` halvings raises
    :class:`EpsilonInstabilityError`.
    """
    _check_knobs(model, fiber_exponent)
    _require(not system.homogeneous, "the affine intersection routine requires an affine system")
    if system.tower_size() > 0:
        raise EpcError(
            "instantiate the system's symbolic deformation scales before "
            "calling the affine intersection routine"
        )
    eta = qq(eta)
    if not 0 < eta < 1:
        raise EpcError(f"the base scale must lie in (0, 1), got {eta}")
    if refine_budget < 1:
        raise EpcError("the refinement budget must be at least 1")
    phi = _parameter_side(system)
    ell = system.ell
    homogenized = tuple(homogenize_in_y(q, ell) for q in system.q_family)
    ball_skip = ell == 0 or any(
        _definite_ball_member(q, ell) for q in system.q_family
    )
    probe_state = "off"
    if bound_probe:
        if system.k > 0:
            _assert_parameter_side_bounded(phi, system.x_vars())
            probe_state = "passed"
        else:
            probe_state = "skipped"
    memo = {} if _memo is None else _memo

    def attempt(scale: QQ | None) -> dict:
        family = homogenized
        if scale is not None:
            ball = constant(-1) * variable("Y0") * variable("Y0")
            for j in range(1, ell + 1):
                ball = ball + constant(scale**2) * variable(f"Y{j}") * variable(f"Y{j}")
            family = homogenized + (ball,)
        hsystem = System(
            ell=ell,
            k=system.k,
            q_family=family,
            p_family=system.p_family,
            formula=system.formula,
            homogeneous=True,
        )
        hsystem.validate()
        sub = chi_intersection_homogeneous(
            hsystem,
            model=model,
            fiber_exponent=fiber_exponent,
            bound_probe=False,
            _memo=memo,
        )
        if sub.chi % 2 != 0:
            raise EpcError(
                "internal consistency failure: the homogenized double "
                f"cover reported the odd characteristic {sub.chi}"
            )
        return {
            "scale": None if scale is None else str(scale),
            "chi_h": sub.chi,
            "chi": sub.chi // 2,
            "homogeneous": sub.trace,
        }

    trace: dict = {
        "algorithm": "intersection",
        "ell": ell,
        "k": system.k,
        "m": system.m,
        "ball_skip": ball_skip,
        "bound_probe": probe_state,
        "attempts": [],
        "chi": 0,
    }
    if ball_skip:
        run = attempt(None)
        trace["attempts"].append(run)
        trace["chi"] = run["chi"]
        return EpcResult(run["chi"], trace)
    scale = eta
    previous: dict | None = None
    for _ in range(refine_budget + 1):
        run = attempt(scale)
        trace["attempts"].append(run)
        if previous is not None and previous["chi"] == run["chi"]:
            trace["chi"] = run["chi"]
            return EpcResult(run["chi"], trace)
        previous = run
        scale = scale / 2
    raise EpsilonInstabilityError(
        f"no two consecutive deformation scales agreed within "
        f"{refine_budget} halvings of {eta}"
    )


# ---------------------------------------------------------------------------
# Arbitrary nonstrict formulas: generalized sign conditions.
# ---------------------------------------------------------------------------


def chi_general(
    system: System,
    *,
    eta: Rat = DEFAULT_ETA,
    refine_budget: int = DEFAULT_REFINE_BUDGET,
    model: str = "simplex",
    fiber_exponent: str = "ell",
) -> EpcResult:
    """Characteristic of the set of an arbitrary nonstrict formula.

    Works for any affine system.  The set is clipped to the balls
    ``|y| <= 1/scale`` and ``|x| <= 1/scale`` (harmless once the scale is
    small enough that every feature fits), stratified over the ``5^m``
    ways of pinning each quadratic member to a generalized sign at its
    own much-smaller scale, and each pinned basic closed piece is
    evaluated by :func:`chi_intersection`; the pieces pinned to ``= eps``
    or ``= -eps`` enter negatively, having been counted once by each
    neighboring piece.  The whole sum is re-run at halved base scales
    until two consecutive runs agree.
    """
    _check_knobs(model, fiber_exponent)
    _require(not system.homogeneous, "the general routine requires an affine system")
    if system.tower_size() > 0:
        raise EpcError(
            "instantiate the system's symbolic deformation scales before "
            "calling the general routine"
        )
    eta = qq(eta)
    if not 0 < eta < 1:
        raise EpcError(f"the base scale must lie in (0, 1), got {eta}")
    if refine_budget < 1:
        raise EpcError("the refinement budget must be at least 1")
    ell, k, m = system.ell, system.k, system.m
    memo: dict = {}

    def attempt(base: QQ) -> dict:
        # Squared-exponent ladder: each scale is the square of the previous
        # one, so every pinning happens far below the scale of anything
        # built from the earlier ones, while coefficient bit-lengths stay
        # within what the decomposition's projections can digest.
        scales = geometric_assignment(m + 1, base, base=2)
        ball_y = constant(-1)
        for j in range(1, ell + 1):
            ball_y = ball_y + constant(scales[0] ** 2) * variable(f"Y{j}") * variable(f"Y{j}")
        ball_x: Polynomial | None = None
        if k > 0:
            ball_x = constant(-1)
            for j in range(1, k + 1):
                ball_x = ball_x + constant(scales[0] ** 2) * variable(f"X{j}") * variable(f"X{j}")
        rows: list[dict] = []
        total = 0
        for code in _codes(m):
            disjunct = membership_disjunct(system, code)
            if disjunct == FALSE:
                rows.append(
                    {"condition": list(code), "doubled": 0, "chi": 0, "skipped": True}
                )
                continue
            members = _pinned_members(system.q_family, code, scales)
            members.append(ball_y)
            inner_p = system.p_family
            side: Formula = disjunct
            if ball_x is not None:
                inner_p = inner_p + (ball_x,)
                side = And((disjunct, Atom(ball_x, Rel.LE)))
            inner = System(
                ell=ell,
                k=k,
                q_family=tuple(_dedup(members)),
                p_family=inner_p,
                formula=side,
                homogeneous=False,
            )
            inner.validate()
            piece = chi_intersection(
                inner,
                model=model,
                fiber_exponent=fiber_exponent,
                bound_probe=False,
                _memo=memo,
            )
            doubled = sum(1 for c in code if abs(c) == 2)
            total += (-1) ** doubled * piece.chi
            rows.append(
                {
                    "condition": list(code),
                    "doubled": doubled,
                    "chi": piece.chi,
                    "skipped": False,
                    "chi_h": piece.trace["attempts"][-1]["chi_h"],
                }
            )
        return {
            "base_scale": str(base),
            "scales": [str(s) for s in scales],
            "rows": rows,
            "chi": total,
        }

    trace: dict = {
        "algorithm": "general",
        "ell": ell,
        "k": k,
        "m": m,
        "attempts": [],
        "chi": 0,
    }
    base = eta
    previous: dict | None = None
    for _ in range(refine_budget + 1):
        run = attempt(base)
        trace["attempts"].append(run)
        if previous is not None and previous["chi"] == run["chi"]:
            trace["chi"] = run["chi"]
            return EpcResult(run["chi"], trace)
        previous = run
        base = base / 2
    raise EpsilonInstabilityError(
        f"no two consecutive deformation scales agreed within "
        f"{refine_budget} halvings of {eta}"
    )


def _codes(m: int) -> list[tuple[int, ...]]:
    from itertools import product

    return [tuple(c) for c in product(GENERALIZED_CODES, repeat=m)]


def _pinned_members(
    q_family: Sequence[Polynomial], code: Sequence[int], scales: Sequence[QQ]
) -> list[Polynomial]:
    """Nonpositivity members realizing one generalized sign code.

    Member ``i`` is pinned at scale ``scales[i + 1]`` (slot 0 being the
    clip ball's): ``= 0`` and ``= +-eps`` become opposite inequality
    pairs, ``>= eps`` and ``<= -eps`` single members.
    """
    members: list[Polynomial] = []
    for i, (q, c) in enumerate(zip(q_family, code)):
        e = constant(scales[i + 1])
        if c == 0:
            members.extend([q, -q])
        elif c == 1:
            members.append(e - q)
        elif c == -1:
            members.append(q + e)
        elif c == 2:
            members.extend([q - e, e - q])
        else:
            members.extend([q + e, -q - e])
    return members


# ---------------------------------------------------------------------------
# The headline bound, as a reporting utility.
# ---------------------------------------------------------------------------


def betti_bound_report(
    ell: int,
    k: int,
    m: int,
    s: int,
    d: int,
    big_o_constant: Rat = 1,
) -> int | QQ:
    """The Betti-number bound ``ell^2 (c (s+ell+m) ell d)^(k+2m)``.

    ``big_o_constant`` is the caller's choice of the constant hidden in
    the asymptotic statement; with the default 1 the value is the bare
    structural product.  Exact; returns an integer whenever the constant
    is one.

    Examples
    --------
    >>> betti_bound_report(1, 0, 0, 1, 1)
    1
    >>> betti_bound_report(2, 1, 1, 0, 1)
    864
    """
    for name, value in (("ell", ell), ("k", k), ("m", m), ("s", s), ("d", d)):
        if value < 0:
            raise ValueError(f"{name} must be nonnegative, got {value}")
    c = qq(big_o_constant)
    if c < 1:
        raise ValueError(f"the asymptotic constant must be at least 1, got {c}")
    bound = qq(ell**2) * (c * (s + ell + m) * ell * d) ** (k + 2 * m)
    if bound.denominator == 1:
        return int(bound)
    return bound
