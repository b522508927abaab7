"""
Tests for series module
"""

import random

import pytest
import sympy

from quantum_curves.errors import PrecisionError, QuantumCurveError
from quantum_curves.field import Field
from quantum_curves.rational import RationalFunction
from quantum_curves.series import INFINITY, LaurentSeries, principal_parts, series_expand, series_log

z = sympy.Symbol("z")
F = Field()


def rf(expr):
    return RationalFunction.from_sympy(expr, F)


def q(a, b=1):
    return F.rational(a, b)


def series(valuation, coeffs, order):
    return LaurentSeries.make(F, valuation, [F.convert(c) for c in coeffs], order)


def random_operands(seed):
    """Three series with pairwise different valuations and orders."""
    rng = random.Random(seed)
    valuations = rng.sample(range(-3, 2), 3)
    orders = rng.sample(range(2, 8), 3)
    operands = []
    for valuation, order in zip(valuations, orders):
        coeffs = [q(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))]
        coeffs += [q(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(order - valuation)]
        operands.append(LaurentSeries.make(F, valuation, coeffs, order))
    return operands


def assert_agree(left, right):
    order = min(left.order, right.order)
    assert left.truncate(order) == right.truncate(order)


class TestSeriesExpand:
    """Test Laurent expansion of rational functions"""

    def test_geometric(self):
        """Test 1/(1 - z) at 0"""
        s = series_expand(rf(1 / (1 - z)), 0, 3)
        assert s.dense(0, 3) == [q(1)] * 4
        assert s.order == 3

    def test_simple_pole(self):
        """Test 1/z at 0 has lowest order -1"""
        s = series_expand(rf(1 / z), 0, 2)
        assert s.valuation == -1
        assert s.dense(-1, 2) == [q(1), q(0), q(0), q(0)]

    def test_at_infinity(self):
        """Test x = z + 1/z at infinity in w = 1/z"""
        s = series_expand(rf(z + 1 / z), INFINITY, 3)
        assert s.valuation == -1
        assert s.coefficient(-1) == q(1)
        assert s.coefficient(0) == q(0)
        assert s.coefficient(1) == q(1)

    def test_product_rule(self):
        """Test expansion commutes with products"""
        f, g = rf(1 / (z - 2)), rf((z + 3) / (z**2 + 1))
        lhs = series_expand(f * g, 1, 5)
        rhs = series_expand(f, 1, 5).mul(series_expand(g, 1, 5))
        assert lhs == rhs

    def test_unknown_coefficient(self):
        """Test asking past the truncation order"""
        s = series_expand(rf(1 / (1 - z)), 0, 2)
        with pytest.raises(PrecisionError):
            s.coefficient(3)


class TestTruncationOrders:
    """Test that operations never claim unknown coefficients"""

    def test_sum_takes_weaker_order(self):
        """Test addition truncates to the smaller order"""
        assert (series(0, [1, 1], 2) + series(0, [1], 5)).order == 2

    def test_product_order(self):
        """Test multiplication order bookkeeping"""
        product = series(0, [1, 1], 2).mul(series(0, [1], 5))
        assert product.order == 2

    def test_inverse(self):
        """Test 1/(1 - s)"""
        inv = series(0, [1, -1], 3).inverse()
        assert inv.dense(0, 3) == [q(1)] * 4

    def test_zero_series(self):
        """Test the zero series"""
        zero = LaurentSeries.zero(F, 4)
        assert zero.is_zero
        assert zero.valuation == 5
        with pytest.raises(QuantumCurveError):
            zero.inverse()


class TestRingAxioms:
    """Test the ring axioms across mixed valuations and truncation orders"""

    @pytest.mark.parametrize("seed", range(10))
    def test_operands_differ(self, seed):
        """Test the random operands really mix valuations and orders"""
        operands = random_operands(seed)
        assert len({s.valuation for s in operands}) == 3
        assert len({s.order for s in operands}) == 3

    @pytest.mark.parametrize("seed", range(10))
    def test_additive_associativity(self, seed):
        """Test (a + b) + c = a + (b + c)"""
        a, b, c = random_operands(seed)
        assert_agree((a + b) + c, a + (b + c))

    @pytest.mark.parametrize("seed", range(10))
    def test_multiplicative_associativity(self, seed):
        """Test (ab)c = a(bc) through the weaker order"""
        a, b, c = random_operands(seed)
        assert_agree((a * b) * c, a * (b * c))

    @pytest.mark.parametrize("seed", range(10))
    def test_distributivity(self, seed):
        """Test a(b + c) = ab + ac through the weaker order"""
        a, b, c = random_operands(seed)
        assert_agree(a * (b + c), a * b + a * c)
        assert_agree((b + c) * a, b * a + c * a)

    @pytest.mark.parametrize("seed", range(10))
    def test_commutativity(self, seed):
        """Test ab = ba keeps the order"""
        a, b, _ = random_operands(seed)
        assert a * b == b * a
        assert a + b == b + a


class TestLogExp:
    """Test series_log and exp"""

    def test_mercator(self):
        """Test log(1 + s)"""
        assert series_log(series(0, [1, 1], 3)).dense(1, 3) == [q(1), q(-1, 2), q(1, 3)]

    def test_log_of_one(self):
        """Test log(1) = 0"""
        assert series_log(LaurentSeries.one(F, 5)).is_zero

    def test_log_needs_unit_constant(self):
        """Test 2 + s is rejected"""
        with pytest.raises(QuantumCurveError, match="constant term 1"):
            series_log(series(0, [2, 1], 3))

    def test_exp(self):
        """Test exp(s)"""
        assert series(1, [1], 3).exp().dense(0, 3) == [q(1), q(1), q(1, 2), q(1, 6)]

    def test_log_exp_inverse(self):
        """Test log(exp(f)) recovers f"""
        f = series(1, [1, -2, 3, 5], 6)
        assert series_log(f.exp()) == f

    def test_exp_needs_positive_valuation(self):
        """Test exp of a series with a constant term"""
        with pytest.raises(QuantumCurveError):
            series(0, [1], 3).exp()


class TestComposition:
    """Test compose and revert"""

    def test_revert(self):
        """Test the inverse of s + s^2"""
        w = series(1, [1, 1], 4).revert()
        assert w.dense(1, 4) == [q(1), q(-1), q(2), q(-5)]

    def test_revert_round_trip(self):
        """Test f(g(s)) = s"""
        f = series(1, [2, 1, -1], 5)
        assert f.compose(f.revert()).dense(1, 5) == [q(1), q(0), q(0), q(0), q(0)]

    def test_compose_negative_powers(self):
        """Test 1/s composed with s + s^2"""
        result = series(-1, [1], 3).compose(series(1, [1, 1], 5))
        assert result.dense(-1, 1) == [q(1), q(-1), q(1)]

    def test_revert_needs_valuation_one(self):
        """Test reversion of s^2"""
        with pytest.raises(QuantumCurveError, match="valuation exactly 1"):
            series(2, [1], 4).revert()


class TestCalculus:
    """Test derivative and integral"""

    def test_derivative(self):
        """Test d/ds of s^-1 + s^2"""
        d = series(-1, [1, 0, 0, 1], 2).derivative()
        assert d.dense(-2, 1) == [q(-1), q(0), q(0), q(2)]

    def test_integral_rejects_residue(self):
        """Test s^-1 has no Laurent antiderivative"""
        with pytest.raises(QuantumCurveError, match="s\\^-1"):
            series(-1, [1], 2).integral()

    def test_residue(self):
        """Test the s^-1 coefficient"""
        assert series(-2, [3, 4, 5], 2).residue() == q(4)


class TestPrincipalParts:
    """Test partial fractions"""

    def test_double_pole(self):
        """Test z/(z - 1)^2 = 1/(z - 1) + 1/(z - 1)^2"""
        parts, remainder = principal_parts(rf(z / (z - 1) ** 2), [F.one])
        assert parts == {(0, 0): q(1), (0, 1): q(1)}
        assert remainder.is_zero

    def test_polynomial_remainder(self):
        """Test the polynomial part is returned"""
        parts, remainder = principal_parts(rf(z + 1 / (z + 1)), [F.convert(-1)])
        assert parts == {(0, 0): q(1)}
        assert remainder == rf(z)

    def test_pole_elsewhere(self):
        """Test a pole outside the given points"""
        with pytest.raises(QuantumCurveError, match="poles outside"):
            principal_parts(rf(1 / z), [F.one])
