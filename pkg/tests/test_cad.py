"""Cylindrical decomposition: cell structure, sign invariance, and the
Borel-Moore characteristic tables the rest of the engine consumes."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadchi.cad import (
    CadError,
    content_in,
    cylindrical_decomposition,
    poly_gcd,
    squarefree_part_in,
)
from quadchi.formulas import Atom, Rel, TRUE, parse_formula
from quadchi.polynomials import Polynomial, constant, parse_polynomial, variable
from quadchi.scalars import qq


class TestGcdMachinery:
    def test_gcd_of_shared_factor(self):
        a = parse_polynomial("Y1^2*Y2 - Y2")
        b = parse_polynomial("Y1*Y2 - Y2")
        g = poly_gcd(a, b)
        assert g.key() == parse_polynomial("Y1*Y2 - Y2").key()

    def test_gcd_of_coprime_is_constant(self):
        g = poly_gcd(parse_polynomial("Y1 + 1"), parse_polynomial("Y2 - 1"))
        assert g.is_constant()

    def test_content_split(self):
        c = content_in(parse_polynomial("Y1*Y2^2 + Y1^2*Y2"), "Y2")
        assert c.key() == parse_polynomial("Y1").key()

    def test_squarefree_part(self):
        sq = parse_polynomial("Y2^2 - 2*Y1*Y2 + Y1^2")
        sf = squarefree_part_in(sq, "Y2")
        assert sf.degree("Y2") == 1

    def test_gcd_with_zero(self):
        p = parse_polynomial("Y1 + 2")
        assert poly_gcd(Polynomial.zero(), p).key() == p.key()


class TestCircle:
    def _decomp(self):
        return cylindrical_decomposition(
            [parse_polynomial("Y1^2 + Y2^2 - 1")], ["Y1", "Y2"]
        )

    def test_cell_count_and_total(self):
        d = self._decomp()
        assert len(d.cells) == 13
        assert d.chi_bm_total() == 1

    def test_dimension_census(self):
        d = self._decomp()
        census: dict[int, int] = {}
        for c in d.cells:
            census[c.dimension] = census.get(c.dimension, 0) + 1
        assert census == {0: 2, 1: 6, 2: 5}

    def test_sign_condition_table(self):
        table = self._decomp().chi_bm_table()
        assert table == {(-1,): 1, (0,): 0, (1,): 0}

    def test_formula_characteristics(self):
        d = self._decomp()
        f = d.input_polys[0]
        closed_disk = Atom(f, Rel.LE)
        boundary = Atom(f, Rel.EQ)
        outside = Atom(f, Rel.GE)
        assert d.chi_bm_of_formula(closed_disk) == 1
        assert d.chi_bm_of_formula(boundary) == 0
        assert d.chi_bm_of_formula(outside) == 0
        assert d.chi_bm_of_formula(TRUE) == 1

    def test_cylinder_indices_are_consistent(self):
        d = self._decomp()
        assert len({c.index for c in d.cells}) == len(d.cells)
        assert all(len(c.index) == 2 for c in d.cells)
        assert all(c.dimension == sum(k % 2 for k in c.index) for c in d.cells)


class TestSphere:
    def test_characteristics_by_sign(self):
        d = cylindrical_decomposition(
            [parse_polynomial("Y1^2 + Y2^2 + Y3^2 - 1")], ["Y1", "Y2", "Y3"]
        )
        assert d.chi_bm_total() == -1
        table = d.chi_bm_table()
        assert table[(-1,)] == -1
        assert table[(0,)] == 2
        assert table[(1,)] == -2


class TestDegenerateInputs:
    def test_coordinate_axes_cross(self):
        d = cylindrical_decomposition([parse_polynomial("Y1*Y2")], ["Y1", "Y2"])
        assert len(d.cells) == 9
        table = d.chi_bm_table()
        assert table == {(0,): -3, (1,): 2, (-1,): 2}

    def test_fibre_where_polynomial_vanishes_identically(self):
        # X1*Y1 + X2 vanishes on the whole Y1-line over X1 = X2 = 0; the
        # zero set is the graph of a function on the other two coordinates.
        d = cylindrical_decomposition(
            [parse_polynomial("X1*Y1 + X2")], ["X1", "X2", "Y1"]
        )
        assert d.chi_bm_total() == -1
        assert d.chi_bm_table()[(0,)] == 1

    def test_zero_polynomial_dropped_with_warning(self):
        d = cylindrical_decomposition(
            [Polynomial.zero(), parse_polynomial("Y1")], ["Y1"]
        )
        assert len(d.warnings) == 1
        assert all(c.signs[0] == 0 for c in d.cells)
        assert {c.signs[1] for c in d.cells} == {-1, 0, 1}

    def test_point_space(self):
        d = cylindrical_decomposition([constant(3), constant(-2)], [])
        assert len(d.cells) == 1
        cell = d.cells[0]
        assert cell.dimension == 0 and cell.signs == (1, -1)
        assert d.chi_bm_total() == 1

    def test_repeated_input_polynomials(self):
        p = parse_polynomial("Y1^2 - 1")
        d = cylindrical_decomposition([p, p], ["Y1"])
        assert all(c.signs[0] == c.signs[1] for c in d.cells)


class TestValidation:
    def test_tower_coefficients_rejected(self):
        with pytest.raises(CadError):
            cylindrical_decomposition(
                [parse_polynomial("Y1 - eps0", tower_size=1)], ["Y1"]
            )

    def test_foreign_variable_rejected(self):
        with pytest.raises(CadError):
            cylindrical_decomposition([parse_polynomial("Y1 + X1")], ["Y1"])

    def test_duplicate_order_rejected(self):
        with pytest.raises(CadError):
            cylindrical_decomposition([parse_polynomial("Y1")], ["Y1", "Y1"])

    def test_formula_polynomial_must_be_input(self):
        d = cylindrical_decomposition([parse_polynomial("Y1")], ["Y1"])
        with pytest.raises(CadError):
            d.chi_bm_of_formula(Atom(parse_polynomial("Y1 - 5"), Rel.EQ))


@st.composite
def small_polys(draw, vars_):
    n = draw(st.integers(1, 4))
    p = Polynomial.zero()
    for _ in range(n):
        c = draw(st.integers(-3, 3))
        term = constant(c)
        for v in vars_:
            term = term * variable(v) ** draw(st.integers(0, 2))
        p = p + term
    return p


class TestInvariants:
    @settings(max_examples=15, deadline=None)
    @given(st.lists(small_polys(["Y1"]), min_size=1, max_size=2))
    def test_line_total_is_minus_one(self, polys):
        d = cylindrical_decomposition(polys, ["Y1"])
        assert d.chi_bm_total() == -1

    @settings(max_examples=12, deadline=None)
    @given(st.lists(small_polys(["Y1", "Y2"]), min_size=1, max_size=2))
    def test_plane_total_is_one(self, polys):
        d = cylindrical_decomposition(polys, ["Y1", "Y2"])
        assert d.chi_bm_total() == 1

    @settings(max_examples=12, deadline=None)
    @given(small_polys(["Y1", "Y2"]))
    def test_samples_realize_recorded_signs(self, p):
        d = cylindrical_decomposition([p], ["Y1", "Y2"])
        for c in d.cells:
            assert c.sample.sign(p) == c.signs[0]
