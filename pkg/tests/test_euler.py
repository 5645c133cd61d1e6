"""Tests for the four characteristic routines and the index machinery.

Expected values are classical characteristics (spheres, balls, products
of half-lines) plus hand-checked small cases; the brute-force
decomposition oracle recomputes every engine value on the same systems,
so each assertion pins the engine against an independent computation.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadchi.euler import (
    EpcError,
    betti_bound_report,
    chi_general,
    chi_intersection,
    chi_intersection_homogeneous,
    chi_union_homogeneous,
    index_from_signs,
    index_sign_sequence,
)
from quadchi.formulas import And, Atom, Rel, System, TRUE, parse_system
from quadchi.oracle import chi_direct_system, load_fixture
from quadchi.polynomials import char_poly, constant, parse_polynomial
from quadchi.scalars import qq, tower_eps


def _index_of_matrix(rows):
    """Negative-eigenvalue count of an integer symmetric matrix via the
    characteristic-coefficient sign sequence."""
    mat = [[constant(qq(x)) for x in row] for row in rows]
    coeffs = char_poly(mat)[:-1]
    signs = []
    for c in coeffs:
        v = qq(c.constant_value())
        signs.append((v > 0) - (v < 0))
    return index_from_signs(index_sign_sequence(signs))


def _congruence_by_shears(diag, shears):
    """``E diag(d) E^T`` for a product of integer shear matrices ``E``;
    congruence preserves the inertia (Sylvester's law)."""
    n = len(diag)
    m = [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j, c in shears:
        i, j = i % n, j % n
        if i == j:
            continue
        for t in range(n):
            m[i][t] += c * m[j][t]
        for t in range(n):
            m[t][i] += c * m[t][j]
    return m


class TestIndexSequence:
    def test_positive_definite_two_by_two(self):
        assert _index_of_matrix([[1, 0], [0, 2]]) == 0

    def test_negative_definite_two_by_two(self):
        assert _index_of_matrix([[-1, 0], [0, -2]]) == 2

    def test_indefinite_two_by_two(self):
        assert _index_of_matrix([[-1, 0], [0, 3]]) == 1

    def test_zero_eigenvalues_are_dropped(self):
        assert _index_of_matrix([[0, 0, 0], [0, -1, 0], [0, 0, 2]]) == 1
        assert _index_of_matrix([[0, 0], [0, 0]]) == 0

    def test_odd_size_negative_definite(self):
        # The countexample shape for naive alternation rules: every
        # eigenvalue negative with an odd matrix size.
        assert _index_of_matrix([[-1, 0, 0], [0, -2, 0], [0, 0, -3]]) == 3

    def test_off_diagonal_entries(self):
        # Eigenvalues of [[0, 2], [2, 0]] are -2 and 2.
        assert _index_of_matrix([[0, 2], [2, 0]]) == 1

    def test_sequence_shape(self):
        assert index_sign_sequence([1, -1]) == (1, 1, 1)
        assert index_sign_sequence([1, 1]) == (1, -1, 1)
        assert index_sign_sequence([-1, -1]) == (-1, 1, 1)

    def test_sequence_rejects_bad_signs(self):
        with pytest.raises(ValueError):
            index_sign_sequence([2, 0])

    def test_variation_count_requires_monic_tail(self):
        with pytest.raises(ValueError):
            index_from_signs((1, -1))
        with pytest.raises(ValueError):
            index_from_signs(())

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=4),
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=3),
                st.integers(min_value=0, max_value=3),
                st.integers(min_value=-2, max_value=2),
            ),
            max_size=4,
        ),
    )
    def test_congruence_invariance(self, diag, shears):
        m = _congruence_by_shears(diag, shears)
        assert _index_of_matrix(m) == sum(1 for d in diag if d < 0)


def _homogeneous_union(members, ell, k=0, p=(), formula=TRUE):
    return System(
        ell=ell,
        k=k,
        q_family=tuple(parse_polynomial(t) for t in members),
        p_family=tuple(parse_polynomial(t) for t in p),
        formula=formula,
        homogeneous=True,
    )


class TestUnionHomogeneous:
    def test_circle_from_negative_definite_member(self):
        system = _homogeneous_union(["-Y0^2 - Y1^2"], ell=1)
        result = chi_union_homogeneous(system)
        assert result.chi == 0
        assert result.chi == chi_direct_system(system, "union-h")
        assert result.trace["fast_path"]["reason"] == "negative-definite member"
        assert result.recheck()

    def test_two_caps_from_indefinite_member(self):
        system = _homogeneous_union(["Y0^2 + Y1^2 - Y2^2"], ell=2)
        result = chi_union_homogeneous(system)
        assert result.chi == 2
        assert result.chi == chi_direct_system(system, "union-h")
        assert result.trace["rows"]  # genuine sign-condition aggregation
        assert result.recheck()

    def test_antipodal_members_cover_the_sphere(self):
        system = _homogeneous_union(
            ["Y0^2 + Y1^2 - Y2^2", "Y2^2 - Y0^2 - Y1^2"], ell=2
        )
        result = chi_union_homogeneous(system)
        assert result.chi == 2  # the whole 2-sphere
        assert result.chi == chi_direct_system(system, "union-h")
        assert result.trace["fast_path"]["reason"] == "antipodal pair"
        assert result.recheck()

    def test_positive_definite_member_contributes_nothing(self):
        with_empty = _homogeneous_union(
            ["Y0^2 + 2*Y1^2 + 3*Y2^2", "Y0^2 + Y1^2 - Y2^2"], ell=2
        )
        result = chi_union_homogeneous(with_empty)
        assert result.chi == 2
        assert result.chi == chi_direct_system(with_empty, "union-h")
        assert result.trace["dropped_members"] == 1
        assert result.recheck()

    def test_union_over_no_members_is_empty(self):
        system = _homogeneous_union([], ell=1)
        assert chi_union_homogeneous(system).chi == 0

    def test_weight_space_models_agree(self):
        systems = [
            _homogeneous_union(["Y0^2 + Y1^2 - Y2^2"], ell=2),
            _homogeneous_union(
                ["Y0^2 + Y1^2 - Y2^2", "2*Y2^2 - Y0^2 - 3*Y1^2"], ell=2
            ),
        ]
        for system in systems:
            simplex = chi_union_homogeneous(system, model="simplex")
            sphere = chi_union_homogeneous(system, model="sphere")
            assert simplex.chi == sphere.chi
            assert simplex.chi == chi_direct_system(system, "union-h")
            assert sphere.recheck()

    def test_published_exponent_variant_differs_on_the_circle(self):
        system = _homogeneous_union(["-Y0^2 - Y1^2"], ell=1)
        corrected = chi_union_homogeneous(system).chi
        published = chi_union_homogeneous(system, fiber_exponent="paper-k").chi
        assert corrected == chi_direct_system(system, "union-h") == 0
        assert published == 2

    def test_unbounded_parameter_side_is_rejected(self):
        system = _homogeneous_union(
            ["-Y0^2 - Y1^2"],
            ell=1,
            k=1,
            p=["X1"],
            formula=Atom(parse_polynomial("X1"), Rel.GE),
        )
        with pytest.raises(EpcError, match="unbounded"):
            chi_union_homogeneous(system)
        # The caller may vouch for boundedness explicitly.
        assert chi_union_homogeneous(system, bound_probe=False).recheck()

    def test_affine_systems_are_rejected(self):
        affine = System(
            ell=1,
            k=0,
            q_family=(parse_polynomial("Y1^2 - 1"),),
            p_family=(),
            formula=TRUE,
            homogeneous=False,
        )
        with pytest.raises(EpcError, match="homogeneous"):
            chi_union_homogeneous(affine)

    def test_symbolic_scales_require_instantiation(self):
        eps = tower_eps(0, 1)
        member = constant(eps) * parse_polynomial("Y1^2") - parse_polynomial("Y0^2")
        system = System(
            ell=1,
            k=0,
            q_family=(member,),
            p_family=(),
            formula=TRUE,
            homogeneous=True,
        )
        with pytest.raises(EpcError, match="instantiation"):
            chi_union_homogeneous(system)
        result = chi_union_homogeneous(system, instantiation=[qq(1, 4)])
        assert result.chi == 2  # two arcs of the circle around Y0 = +-1
        assert result.trace["instantiation"] == ["1/4"]
        assert result.recheck()

    def test_unknown_knobs_are_rejected(self):
        system = _homogeneous_union(["-Y0^2 - Y1^2"], ell=1)
        with pytest.raises(EpcError, match="model"):
            chi_union_homogeneous(system, model="cube")
        with pytest.raises(EpcError, match="exponent"):
            chi_union_homogeneous(system, fiber_exponent="always-2")


class TestIntersectionHomogeneous:
    def test_cone_caps(self):
        system = load_fixture("cone-caps-h")
        result = chi_intersection_homogeneous(system)
        assert result.chi == 2
        assert result.chi == chi_direct_system(system, "intersection-h")
        assert result.recheck()

    def test_four_points_from_two_cap_pairs(self):
        system = _homogeneous_union(
            ["Y0^2 + Y1^2 - Y2^2", "Y1^2 + Y2^2 - Y0^2"], ell=2
        )
        result = chi_intersection_homogeneous(system)
        assert result.chi == 4
        assert result.chi == chi_direct_system(system, "intersection-h")
        assert len(result.trace["subsets"]) == 3
        assert [row["sign"] for row in result.trace["subsets"]] == [1, 1, -1]
        assert result.recheck()

    def test_duplicate_members_are_idempotent(self):
        once = _homogeneous_union(["-Y0^2 - Y1^2"], ell=1)
        twice = _homogeneous_union(["-Y0^2 - Y1^2", "-Y0^2 - Y1^2"], ell=1)
        a = chi_intersection_homogeneous(once)
        b = chi_intersection_homogeneous(twice)
        assert a.chi == b.chi == 0  # the circle either way
        assert b.recheck()

    def test_no_members_gives_the_whole_sphere_bundle(self):
        formula = Atom(parse_polynomial("X1^2 - X1"), Rel.LE)
        even = System(
            ell=2, k=1, q_family=(),
            p_family=(parse_polynomial("X1^2 - X1"),),
            formula=formula, homogeneous=True,
        )
        odd = System(
            ell=1, k=1, q_family=(),
            p_family=(parse_polynomial("X1^2 - X1"),),
            formula=formula, homogeneous=True,
        )
        r_even = chi_intersection_homogeneous(even)
        assert r_even.chi == 2  # chi(S^2) * chi([0, 1])
        assert r_even.trace["fast_path"] == {"chi_v": 1, "sphere_factor": 2}
        assert chi_intersection_homogeneous(odd).chi == 0
        assert r_even.recheck()

    def test_affine_systems_are_rejected(self):
        with pytest.raises(EpcError, match="homogeneous"):
            chi_intersection_homogeneous(load_fixture("ball1"))


def _affine_intersection(members, ell, k=0, p=(), formula=TRUE):
    return System(
        ell=ell,
        k=k,
        q_family=tuple(parse_polynomial(t) for t in members),
        p_family=tuple(parse_polynomial(t) for t in p),
        formula=formula,
        homogeneous=False,
    )


class TestIntersectionAffine:
    def test_disk_skips_the_deformation_ball(self):
        system = _affine_intersection(["Y1^2 + Y2^2 - 1"], ell=2)
        result = chi_intersection(system)
        assert result.chi == 1
        assert result.chi == chi_direct_system(system, "intersection")
        assert result.trace["ball_skip"] is True
        assert len(result.trace["attempts"]) == 1
        assert result.trace["attempts"][0]["scale"] is None
        assert result.recheck()

    def test_annulus(self):
        system = _affine_intersection(
            ["1 - Y1^2 - Y2^2", "Y1^2 + Y2^2 - 4"], ell=2
        )
        result = chi_intersection(system)
        assert result.chi == 0
        assert result.chi == chi_direct_system(system, "intersection")
        assert result.recheck()

    def test_parameter_dependent_member_runs_the_scale_loop(self):
        system = load_fixture("parabola-cap-i")
        result = chi_intersection(system)
        assert result.chi == 1
        assert result.chi == chi_direct_system(system, "intersection")
        assert result.trace["ball_skip"] is False
        attempts = result.trace["attempts"]
        assert len(attempts) >= 2
        assert all(a["scale"] is not None for a in attempts)
        assert attempts[-1]["chi"] == attempts[-2]["chi"]
        assert result.recheck()

    def test_doubling_identity_holds_in_every_attempt(self):
        for system in (
            _affine_intersection(["Y1^2 + Y2^2 - 1"], ell=2),
            load_fixture("parabola-cap-i"),
        ):
            for attempt in chi_intersection(system).trace["attempts"]:
                assert attempt["chi_h"] == 2 * attempt["chi"]
                assert attempt["chi_h"] % 2 == 0

    def test_base_scale_must_be_a_unit_fraction(self):
        system = _affine_intersection(["Y1^2 - 1"], ell=1)
        with pytest.raises(EpcError, match="base scale"):
            chi_intersection(system, eta=qq(2))
        with pytest.raises(EpcError, match="budget"):
            chi_intersection(system, refine_budget=0)

    def test_homogeneous_systems_are_rejected(self):
        with pytest.raises(EpcError, match="affine"):
            chi_intersection(load_fixture("cone-caps-h"))

    def test_formula_may_only_touch_the_parameter_side(self):
        with pytest.raises(EpcError, match="parameter-side"):
            chi_intersection(load_fixture("ball1"))


GENERAL_FIXTURES = [
    ("sphere0", 2),
    ("sphere1", 0),
    ("sphere2", 2),
    ("sphere3", 0),
    ("ball1", 1),
    ("ball2", 1),
    ("ball3", 1),
    ("interval-x", 1),
    ("empty1", 0),
    ("rays1", 2),
    ("parabola-cap", 1),
    ("cylinder", 0),
    ("paraboloid-shell", 1),
]


class TestGeneral:
    @pytest.mark.parametrize("name,expected", GENERAL_FIXTURES)
    def test_catalog_values(self, name, expected):
        system = load_fixture(name)
        result = chi_general(system)
        assert result.chi == expected
        assert result.chi == chi_direct_system(system)
        assert result.recheck()

    def test_trace_records_the_code_sweep(self):
        result = chi_general(load_fixture("ball1"))
        attempts = result.trace["attempts"]
        assert len(attempts) >= 2
        assert attempts[-1]["chi"] == attempts[-2]["chi"]
        rows = attempts[-1]["rows"]
        assert len(rows) == 5  # one per generalized sign of the one member
        assert any(row["skipped"] for row in rows)
        assert any(not row["skipped"] for row in rows)

    def test_coarse_base_scale_still_converges(self):
        assert chi_general(load_fixture("ball1"), eta=qq(1, 8)).chi == 1

    def test_validation(self):
        with pytest.raises(EpcError, match="affine"):
            chi_general(load_fixture("cone-caps-h"))
        with pytest.raises(EpcError, match="base scale"):
            chi_general(load_fixture("ball1"), eta=qq(3, 2))
        with pytest.raises(EpcError, match="budget"):
            chi_general(load_fixture("ball1"), refine_budget=0)


class TestBettiBound:
    def test_line_segment_shape(self):
        assert betti_bound_report(1, 0, 0, 1, 1) == 1

    def test_mixed_shape(self):
        assert betti_bound_report(2, 1, 1, 0, 1) == 864

    def test_monotone_in_degree_and_members(self):
        base = betti_bound_report(2, 1, 1, 1, 1)
        assert betti_bound_report(2, 1, 1, 1, 2) > base
        assert betti_bound_report(2, 1, 2, 1, 1) > base

    def test_rational_constant(self):
        exact = betti_bound_report(2, 1, 1, 0, 1, big_o_constant=qq(3, 2))
        assert exact == qq(864) * qq(3, 2) ** 3

    def test_validation(self):
        with pytest.raises(ValueError, match="nonnegative"):
            betti_bound_report(-1, 0, 0, 0, 1)
        with pytest.raises(ValueError, match="constant"):
            betti_bound_report(1, 0, 0, 0, 1, big_o_constant=qq(1, 2))
