"""Brute-force Euler characteristic oracle and the fixture catalog.

This module computes Euler characteristics by cylindrical decomposition
alone, with none of the quadratic-family structure the main engine
exploits.  It exists to be disagreed with: every optimized path must
reproduce these numbers.

For a closed semialgebraic set ``S`` the ordinary Euler characteristic
equals the Borel-Moore one once ``S`` is compact, and a closed set
deformation-retracts onto its intersection with a closed ball whose radius
dominates every feature of the set.  So the oracle conjoins a clip
constraint ``x_1^2 + ... + x_n^2 <= R^2``, decomposes, and sums
``(-1)**dim`` over the satisfying cells.  The default radius ``2**10`` is
far beyond every catalogued fixture; callers probing sets with features
past that radius must raise it.

The fixture catalog pairs small systems (serialized under ``fixtures/``)
with their known characteristics and the pipeline mode each one targets.
Every value here is either classical (spheres, balls) or recomputed by
this oracle in the test suite before the main engine is held to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .cad import cylindrical_decomposition
from .formulas import And, Atom, Formula, Or, Rel, System, parse_system, polys_of
from .polynomials import Polynomial, constant, variable
from .scalars import QQ, qq

__all__ = [
    "DEFAULT_CLIP_RADIUS",
    "chi_direct",
    "chi_direct_system",
    "parameter_side_formula",
    "realization_formula",
    "sphere_polynomial",
    "clip_polynomial",
    "Fixture",
    "FIXTURES",
    "fixture_by_name",
    "load_fixture",
]

DEFAULT_CLIP_RADIUS: QQ = qq(2**10)

_MODES = ("general", "intersection", "union-h", "intersection-h")


def sphere_polynomial(ell: int) -> Polynomial:
    """``Y0^2 + ... + Yell^2 - 1``, the unit-sphere equation."""
    total = constant(-1)
    for i in range(ell + 1):
        y = variable(f"Y{i}")
        total = total + y * y
    return total


def clip_polynomial(var_order: Sequence[str], radius: QQ) -> Polynomial:
    total = constant(-(qq(radius) ** 2))
    for v in var_order:
        total = total + variable(v) * variable(v)
    return total


def chi_direct(
    formula: Formula,
    var_order: Sequence[str],
    clip_radius: QQ = DEFAULT_CLIP_RADIUS,
) -> int:
    """Euler characteristic of the closed set a formula defines.

    Parameters
    ----------
    formula:
        A closed formula (only ``=``, ``<=``, ``>=`` atoms) over the listed
        variables.
    var_order:
        The ambient variables; the set lives in their product space.
    clip_radius:
        The set is intersected with the closed ball of this radius; the
        result equals the true characteristic whenever the set's features
        lie inside the ball.

    Returns
    -------
    int
        The Euler characteristic, computed as the Borel-Moore sum over the
        satisfying cells of a decomposition of the clipped set.
    """
    clip = clip_polynomial(var_order, clip_radius)
    clipped = And((formula, Atom(clip, Rel.LE)))
    inputs = list({p.key(): p for p in polys_of(clipped)}.values())
    decomposition = cylindrical_decomposition(inputs, var_order)
    return decomposition.chi_bm_of_formula(clipped)


def parameter_side_formula(system: System) -> Formula:
    """The system's formula, checked to constrain only the parameter side.

    The three structured modes (``intersection``, ``union-h``,
    ``intersection-h``) fix the shape of the quadratic side themselves; the
    system's formula then plays the role of the extra condition on the
    non-quadratic variables.  Every atom must therefore reference a member
    of the parameter-side family.
    """
    allowed = {p.key() for p in system.p_family}
    for poly in polys_of(system.formula):
        if poly.key() not in allowed:
            raise ValueError(
                "structured modes require the formula to constrain only the "
                "parameter-side family; offending polynomial: "
                f"{poly.key()}"
            )
    return system.formula


def realization_formula(system: System, mode: str = "general") -> tuple[Formula, list[str]]:
    """The ambient formula and variable order realizing a system in a mode.

    Modes
    -----
    ``general``
        The system's own formula (for homogeneous systems, conjoined with
        the unit-sphere equation in ``Y0..Yell``).
    ``intersection``
        The basic closed set ``Q_1 <= 0 and ... and Q_m <= 0 and F``
        (affine systems; ``F`` is the system formula, which may constrain
        only the parameter side).
    ``union-h`` / ``intersection-h``
        On the unit sphere and under ``F``: the union of the ``Q_i <= 0``
        sets, or their common intersection (homogeneous systems; ``F`` as
        above).
    """
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {_MODES}")
    order = system.y_vars() + system.x_vars()
    if mode == "general":
        if system.homogeneous:
            return And((Atom(sphere_polynomial(system.ell), Rel.EQ), system.formula)), order
        return system.formula, order
    side = parameter_side_formula(system)
    if mode == "intersection":
        if system.homogeneous:
            raise ValueError("mode 'intersection' applies to affine systems")
        return And(tuple(Atom(q, Rel.LE) for q in system.q_family) + (side,)), order
    if not system.homogeneous:
        raise ValueError(f"mode {mode!r} applies to homogeneous systems")
    sphere = Atom(sphere_polynomial(system.ell), Rel.EQ)
    if mode == "union-h":
        union = Or(tuple(Atom(q, Rel.LE) for q in system.q_family))
        return And((sphere, union, side)), order
    caps = tuple(Atom(q, Rel.LE) for q in system.q_family)
    return And((sphere,) + caps + (side,)), order


def chi_direct_system(
    system: System,
    mode: str = "general",
    clip_radius: QQ = DEFAULT_CLIP_RADIUS,
) -> int:
    """Oracle characteristic of a system's realization in the given mode."""
    formula, order = realization_formula(system, mode)
    return chi_direct(formula, order, clip_radius)


# ---------------------------------------------------------------------------
# Fixture catalog.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    """A catalogued system with its known Euler characteristic.

    ``mode`` names the realization (see :func:`realization_formula`) the
    expected value refers to.
    """

    name: str
    filename: str
    mode: str
    expected_chi: int
    note: str


FIXTURES: tuple[Fixture, ...] = (
    Fixture("sphere0", "sphere0.sys", "general", 2, "the two-point sphere y^2 = 1"),
    Fixture("sphere1", "sphere1.sys", "general", 0, "unit circle in the plane"),
    Fixture("sphere2", "sphere2.sys", "general", 2, "unit 2-sphere in 3-space"),
    Fixture("sphere3", "sphere3.sys", "general", 0, "unit 3-sphere in 4-space"),
    Fixture("ball1", "ball1.sys", "general", 1, "closed interval [-1, 1]"),
    Fixture("ball2", "ball2.sys", "general", 1, "closed unit disk"),
    Fixture("ball3", "ball3.sys", "general", 1, "closed unit 3-ball"),
    Fixture("box2", "box2.sys", "general", 1, "closed square [-1, 1]^2"),
    Fixture("annulus2", "annulus2.sys", "general", 0, "closed annulus 1 <= |y| <= 2"),
    Fixture(
        "rays1",
        "rays1.sys",
        "general",
        2,
        "y(y-1) >= 0: two closed half-lines",
    ),
    Fixture(
        "rays2",
        "rays2.sys",
        "general",
        4,
        "product of two copies of the two-half-line set",
    ),
    Fixture(
        "rays3",
        "rays3.sys",
        "general",
        8,
        "product of three copies of the two-half-line set",
    ),
    Fixture(
        "parabola-cap",
        "parabola-cap.sys",
        "general",
        1,
        "y^2 <= x and x in [0, 1]: a contractible parabolic cap",
    ),
    Fixture(
        "parabola-cap-i",
        "parabola-cap-i.sys",
        "intersection",
        1,
        "the parabolic cap presented as a basic closed set with a parameter-side slab",
    ),
    Fixture(
        "interval-x",
        "interval-x.sys",
        "general",
        1,
        "parameter-side-only system: the interval [-1, 1] on the x-axis",
    ),
    Fixture(
        "empty1",
        "empty1.sys",
        "general",
        0,
        "y^2 + 1 <= 0: the empty set",
    ),
    Fixture(
        "cylinder",
        "cylinder.sys",
        "general",
        0,
        "unit circle times the interval [-1, 1]",
    ),
    Fixture(
        "paraboloid-shell",
        "paraboloid-shell.sys",
        "general",
        1,
        "graph of x = y1^2 + y2^2 over the unit disk: a topological disk",
    ),
    Fixture(
        "sphere-cover-h",
        "sphere-cover-h.sys",
        "union-h",
        2,
        "one definite and one negative-definite quadric: the union covers the 2-sphere",
    ),
    Fixture(
        "circle-slab-h",
        "circle-slab-h.sys",
        "union-h",
        0,
        "an everywhere-nonpositive quadric over the slab x in [0, 1]: a bounded cylinder",
    ),
    Fixture(
        "cone-caps-h",
        "cone-caps-h.sys",
        "intersection-h",
        2,
        "nonpositive side of a double cone meets the 2-sphere in two polar caps",
    ),
)


def fixture_by_name(name: str) -> Fixture:
    for f in FIXTURES:
        if f.name == name:
            return f
    raise KeyError(f"no fixture named {name!r}")


def load_fixture(name: str) -> System:
    """Parse a catalogued system from the packaged fixture files."""
    f = fixture_by_name(name)
    text = resources.files("quadchi").joinpath("fixtures", f.filename).read_text()
    return parse_system(text)
