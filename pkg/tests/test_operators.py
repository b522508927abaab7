"""
Tests for operators module
"""

import pytest
import sympy

from quantum_curves.errors import ExpressionSyntaxError, QuantumCurveError
from quantum_curves.field import Field
from quantum_curves.operators import (
    OperatorPolynomial,
    conjugate_operator,
    derivative_in_y,
    first_order_operator,
    format_operator,
    load_operator,
    multiply,
    parse_operator_file,
    semiclassical_limit,
)
from quantum_curves.rational import RationalFunction

F = Field()


@pytest.fixture
def catalan_op():
    return load_operator("catalan")


class TestParsing:
    """Test operator files"""

    def test_catalan(self, catalan_op):
        """Test the bundled Catalan operator"""
        assert catalan_op.flavour == "differential"
        assert dict(catalan_op.term(0)) == {(0, 2): F.one, (1, 1): F.convert(-1), (0, 0): F.one}
        assert catalan_op.order == 0

    def test_difference_flavour(self):
        """Test Yp and Ym select the difference flavour"""
        op = load_operator("gw")
        assert op.flavour == "difference"
        assert dict(op.term(0)) == {(0, 1): F.one, (0, -1): F.one, (1, 0): F.convert(-1)}
        assert op.constants["t"] == "1/2"

    def test_hbar_terms(self):
        """Test higher powers of hbar"""
        op = parse_operator_file("const t = 3/2\nhbar^0 : Yp + Ym - x\nhbar^1 : t - 1/2\n")
        assert op.order == 1
        assert dict(op.term(1)) == {(0, 0): F.one}

    def test_comments_and_blank_lines(self):
        """Test comments are ignored"""
        op = parse_operator_file("# first order\n\nhbar^0 : x*y - 1  # Example\n")
        assert dict(op.term(0)) == {(1, 1): F.one, (0, 0): F.convert(-1)}

    def test_mixed_generators(self):
        """Test y together with Yp"""
        with pytest.raises(QuantumCurveError, match="mixes"):
            parse_operator_file("hbar^0 : y + Yp - x")

    def test_missing_classical_part(self):
        """Test a file without hbar^0"""
        with pytest.raises(QuantumCurveError, match="no 'hbar\\^0"):
            parse_operator_file("hbar^1 : x")

    def test_zero_classical_part(self):
        """Test P_0 = 0"""
        with pytest.raises(QuantumCurveError, match="must be nonzero"):
            parse_operator_file("hbar^0 : x - x")

    def test_duplicate_power(self):
        """Test hbar^1 given twice"""
        with pytest.raises(QuantumCurveError, match="defined twice"):
            parse_operator_file("hbar^0 : y\nhbar^1 : 1\nhbar^1 : 2")

    def test_bad_line(self):
        """Test a line without a colon"""
        with pytest.raises(QuantumCurveError, match="expected 'hbar\\^k"):
            parse_operator_file("y^2 - x*y + 1")

    def test_negative_power(self):
        """Test y^-1 inside a polynomial"""
        with pytest.raises(ExpressionSyntaxError, match="negative power"):
            parse_operator_file("hbar^0 : y^-1")

    def test_unknown_operator(self):
        """Test a missing operator file"""
        with pytest.raises(QuantumCurveError, match="Bundled: catalan"):
            load_operator("nonexistent")


class TestFormatting:
    """Test operator printing"""

    def test_catalan(self, catalan_op):
        """Test the printed Catalan operator"""
        assert format_operator(catalan_op) == "# catalan (differential)\nhbar^0 : y^2 - x*y + 1\n"

    def test_difference(self):
        """Test shifts print as Yp and Ym"""
        assert "hbar^0 : Yp + Ym - x" in format_operator(load_operator("gw"))

    def test_reparse(self):
        """Test printed text reads back to the same operator"""
        op = parse_operator_file("hbar^0 : 1/2*x^2*y^3 - 3*y\nhbar^2 : -x + 2/3")
        assert parse_operator_file(format_operator(op)) == op


class TestSemiclassicalLimit:
    """Test the symbol of an operator"""

    def test_catalan(self, catalan_op):
        """Test hbar^2 d^2/dx^2 - x hbar d/dx + 1 becomes y^2 - xy + 1"""
        R, P = semiclassical_limit(catalan_op)
        x, y = R.gens
        assert P == y**2 - x * y + 1

    def test_first_order(self):
        """Test x y - 1"""
        R, P = semiclassical_limit(parse_operator_file("hbar^0 : x*y - 1\nhbar^1 : 5"))
        x, y = R.gens
        assert P == x * y - 1

    def test_multiplication_operator(self):
        """Test an operator without y"""
        R, P = semiclassical_limit(parse_operator_file("hbar^0 : x^2 - 1"))
        x, _ = R.gens
        assert P == x**2 - 1

    def test_shift_symbols(self):
        """Test the difference flavour uses Yp and Ym"""
        R, P = semiclassical_limit(load_operator("gw"))
        x, yp, ym = R.gens
        assert P == yp + ym - x

    def test_derivative_in_y(self, catalan_op):
        """Test dP/dy = 2y - x"""
        assert derivative_in_y(catalan_op) == {(0, 1): F.convert(2), (1, 0): F.convert(-1)}


class TestNormalOrdering:
    """Test normal-ordered products"""

    def test_commutator(self):
        """Test y x = x y + hbar"""
        product = multiply("differential", F, {(0, 0, 1): F.one}, {(0, 1, 0): F.one})
        assert product == {(0, 1, 1): F.one, (1, 0, 0): F.one}

    def test_second_power(self):
        """Test y^2 x^2 = x^2 y^2 + 4 hbar x y + 2 hbar^2"""
        product = multiply("differential", F, {(0, 0, 2): F.one}, {(0, 2, 0): F.one})
        assert product == {(0, 2, 2): F.one, (1, 1, 1): F.convert(4), (2, 0, 0): F.convert(2)}

    def test_shift(self):
        """Test e^y x = (x + hbar) e^y"""
        product = multiply("difference", F, {(0, 0, 1): F.one}, {(0, 1, 0): F.one})
        assert product == {(0, 1, 1): F.one, (1, 0, 1): F.one}

    def test_backward_shift(self):
        """Test e^-y x^2 = (x - hbar)^2 e^-y"""
        product = multiply("difference", F, {(0, 0, -1): F.one}, {(0, 2, 0): F.one})
        assert product == {(0, 2, -1): F.one, (1, 1, -1): F.convert(-2), (2, 0, -1): F.one}


class TestConjugation:
    """Test y -> y - g'(x)"""

    def test_catalan_gaussian_shift(self, catalan_op):
        """Test g = x^2/2 gives y^2 - 3xy + 2x^2 + 1 - hbar"""
        g = RationalFunction.from_sympy(sympy.Symbol("x") ** 2 / 2, F, "x")
        conjugated = conjugate_operator(catalan_op, g)
        expected = parse_operator_file("hbar^0 : y^2 - 3*x*y + 2*x^2 + 1\nhbar^1 : -1")
        assert conjugated == expected

    def test_linear_shift(self, catalan_op):
        """Test a constant g' shifts y only"""
        g = RationalFunction.from_sympy(2 * sympy.Symbol("x"), F, "x")
        conjugated = conjugate_operator(parse_operator_file("hbar^0 : y"), g)
        assert conjugated == parse_operator_file("hbar^0 : y - 2")

    def test_difference_rejected(self):
        """Test the difference flavour"""
        g = RationalFunction.variable(F, "x")
        with pytest.raises(QuantumCurveError, match="differential flavour"):
            conjugate_operator(load_operator("gw"), g)

    def test_non_polynomial(self, catalan_op):
        """Test g = 1/x"""
        g = RationalFunction.variable(F, "x") ** -1
        with pytest.raises(QuantumCurveError, match="not a polynomial"):
            conjugate_operator(catalan_op, g)


class TestFirstOrderOperator:
    """Test Q(x) y - Q'(x)"""

    def test_matches_bundled_file(self):
        """Test lambdas 1, -1"""
        assert first_order_operator([1, -1]) == load_operator("first_order")

    def test_single_lambda(self):
        """Test lambda = 0 gives x y - 1"""
        assert first_order_operator([0]) == parse_operator_file("hbar^0 : x*y - 1")

    def test_empty(self):
        """Test no lambdas"""
        with pytest.raises(QuantumCurveError):
            first_order_operator([])


class TestOperatorPolynomial:
    """Test the operator type"""

    def test_unknown_flavour(self):
        """Test a bad flavour tag"""
        with pytest.raises(QuantumCurveError, match="unknown operator flavour"):
            OperatorPolynomial("q-difference", F, ({(0, 1): F.one},))

    def test_negative_y_power(self):
        """Test y^-1 in the differential flavour"""
        with pytest.raises(QuantumCurveError, match="difference flavour"):
            OperatorPolynomial("differential", F, ({(0, -1): F.one},))

    def test_degrees(self, catalan_op):
        """Test x- and y-degrees"""
        assert catalan_op.x_degree() == 1
        assert catalan_op.y_degree() == 2
