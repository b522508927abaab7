"""
Tests for wave module
"""

import pytest
import sympy

from quantum_curves.curve import load_curve
from quantum_curves.errors import CurveError, GuardError, QuantumCurveError
from quantum_curves.logfunc import LogAugmentedFunction
from quantum_curves.rational import RationalFunction
from quantum_curves.recursion import PoleBasisIndex, TopologicalRecursion
from quantum_curves.series import series_expand
from quantum_curves.wave import (
    expand_wave_at_infinity,
    first_order_wave,
    loop_functional,
    make_primitive,
    primitive_principal,
    quantum_omega,
    regularised_s1,
    s_coefficient,
    t_shift,
    wave_expansion,
    wave_xbar_series,
)

z = sympy.Symbol("z")


@pytest.fixture(scope="module")
def catalan():
    return load_curve("catalan")


@pytest.fixture(scope="module")
def engine(catalan):
    return TopologicalRecursion(catalan)


@pytest.fixture(scope="module")
def wave(catalan, engine):
    return wave_expansion(catalan, 3, engine)


def rf(expr, curve):
    return RationalFunction.from_sympy(expr, curve.field, curve.parameter)


class TestPrimitives:
    """Test principal-part primitives"""

    def test_power_rule(self, catalan, engine):
        """Test (z - 1)^-3 dz integrates to -1/2 (z - 1)^-2"""
        F = primitive_principal(engine.omega(1, 1))
        assert F.slot(PoleBasisIndex(1, 2)) == rf(-1 / (2 * (z - 1) ** 2), catalan)

    @pytest.mark.parametrize("g,n", [(0, 3), (1, 1)])
    def test_derivative_recovers_omega(self, engine, g, n):
        """Test d1...dn F = omega"""
        omega = engine.omega(g, n)
        symbols = sympy.symbols(f"z1:{n + 1}")
        F = primitive_principal(omega)
        assert sympy.simplify(F.differentiate(symbols) - omega.to_sympy(symbols)) == 0

    def test_diagonal_pole_order(self, catalan, engine):
        """Test F^1_1(z) has poles of order 3 at z = +-1"""
        diagonal = primitive_principal(engine.omega(1, 1)).diagonal()
        for alpha in (1, -1):
            assert series_expand(diagonal, alpha, 0).valuation == -3

    def test_unstable_rejected(self, engine):
        """Test the Cauchy kernel has no principal primitive"""
        with pytest.raises(QuantumCurveError, match="unstable"):
            primitive_principal(engine.omega(0, 2))

    def test_basepoint_primitive_vanishes_at_basepoint(self, catalan, engine):
        """Test F(b) = 0 for the basepoint primitive"""
        b = catalan.field.convert(2)
        F = make_primitive(engine.omega(1, 1), "basepoint", b)
        assert F.diagonal().evaluate(b) == catalan.field.zero

    def test_basepoint_at_branch_point(self, catalan, engine):
        """Test a basepoint on a branch point"""
        with pytest.raises(QuantumCurveError, match="is a branch point"):
            make_primitive(engine.omega(1, 1), "basepoint", catalan.field.one)

    def test_unknown_primitive(self, engine):
        """Test an unknown primitive name"""
        with pytest.raises(QuantumCurveError, match="unknown primitive"):
            make_primitive(engine.omega(1, 1), "other")


class TestSCoefficients:
    """Test S_k on the Catalan curve"""

    def test_s0_derivative_is_y(self, catalan, wave):
        """Test dS_0/dx = y"""
        assert wave.derivative(0) == catalan.y

    def test_s1_closed_form(self, catalan, wave):
        """Test S_1 = -1/2 log(1 - z^-2)"""
        expected = LogAugmentedFunction.log_of(rf(1 - z**-2, catalan), catalan.field.rational(-1, 2))
        assert wave[1] == expected

    def test_s1_derivative(self, catalan, wave):
        """Test dS_1/dx = -z/(z^2 - 1)^2"""
        assert wave.derivative(1).as_rational() == rf(-z / (z**2 - 1) ** 2, catalan)

    @pytest.mark.parametrize("k", [2, 3])
    def test_pole_orders(self, wave, k):
        """Test S_k has poles of order 3k - 3 at z = +-1"""
        rational = wave[k].as_rational()
        for alpha in (1, -1):
            assert series_expand(rational, alpha, 0).valuation == -(3 * k - 3)

    def test_negative_k(self, catalan):
        """Test k < 0"""
        with pytest.raises(GuardError, match="k must be >= 0"):
            s_coefficient(catalan, -1)

    def test_convention_independent(self, catalan, wave):
        """Test S_2 from the displayed kernel matches"""
        displayed = TopologicalRecursion(catalan, convention="displayed")
        assert s_coefficient(catalan, 2, displayed) == wave[2]

    def test_quantum_omega_sign(self, catalan, engine):
        """Test quantum_omega undoes the displayed sign"""
        displayed = TopologicalRecursion(catalan, convention="displayed")
        assert dict(quantum_omega(displayed, 0, 3).coefficients) == dict(
            engine.omega(0, 3).coefficients
        )

    def test_regularised_s1(self, catalan, wave):
        """Test the regularised double integral agrees up to a constant"""
        assert regularised_s1(catalan).diff() == wave[1].diff()

    def test_invariance_under_shift(self, wave):
        """Test S_2 and S_3 survive y -> y + x"""
        shifted = load_curve("catalan_shifted")
        other = wave_expansion(shifted, 3)
        assert other[2] == wave[2]
        assert other[3] == wave[3]

    def test_with_exponent(self, catalan, wave):
        """Test e^{x^2/(2 hbar)} psi lives on the shifted curve"""
        conjugated = wave.with_exponent(rf(z**2 / 2, catalan), "catalan_shifted")
        assert conjugated.curve.y == load_curve("catalan_shifted").y
        assert conjugated.derivative(0) == conjugated.curve.y


class TestTShift:
    """Test the t-family"""

    def test_zero_is_identity(self, wave):
        """Test t = 0"""
        assert t_shift(wave).at(0).terms == wave.terms

    def test_first_order(self, catalan, wave):
        """Test S_1(t) = S_1 + t y"""
        shifted = t_shift(wave).at(3)
        assert shifted[1] == wave[1] + catalan.y * catalan.field.convert(3)

    def test_t_coefficient_of_s2(self, catalan, wave):
        """Test the t^1 coefficient of S_2(t) is dS_1/dx"""
        family = t_shift(wave)
        assert family.coefficients[2][1].as_rational() == rf(-z / (z**2 - 1) ** 2, catalan)

    def test_group_law(self, catalan, wave):
        """Test shifting by 1/2 then 1/3 equals shifting by 5/6"""
        F = catalan.field
        once = t_shift(t_shift(wave).at(F.rational(1, 2))).at(F.rational(1, 3))
        direct = t_shift(wave).at(F.rational(5, 6))
        assert once.terms == direct.terms
        assert once.t == F.rational(5, 6)

    def test_order_guard(self, wave):
        """Test asking past the known terms"""
        with pytest.raises(GuardError):
            t_shift(wave, 5)


class TestLoopFunctional:
    """Test the functional sum of Res dy f"""

    def test_single_pole(self, catalan):
        """Test f = 1/(z - 1) gives -1"""
        f = LogAugmentedFunction(rf(1 / (z - 1), catalan))
        assert loop_functional(catalan, f) == catalan.field.convert(-1)

    def test_constant(self, catalan):
        """Test a constant gives 0"""
        f = LogAugmentedFunction(rf(sympy.Integer(5), catalan))
        assert loop_functional(catalan, f) == catalan.field.zero

    def test_linearity(self, catalan):
        """Test 1/(z - 1) + 1/(z + 1) gives -2"""
        f = LogAugmentedFunction(rf(1 / (z - 1) + 1 / (z + 1), catalan))
        assert loop_functional(catalan, f) == catalan.field.convert(-2)

    def test_log_singularity(self, catalan):
        """Test log(z - 1) is singular at a branch point"""
        f = LogAugmentedFunction.log_of(rf(z - 1, catalan))
        with pytest.raises(CurveError, match="singular"):
            loop_functional(catalan, f)


class TestExpansionAtInfinity:
    """Test S_k and psi-bar in 1/x"""

    def test_s0_row(self, catalan, wave):
        """Test S_0 = log x - u^2/2 - u^4/2 + ..."""
        row = expand_wave_at_infinity(wave, 4)[0]
        F = catalan.field
        assert row.log_x == F.one
        assert row.series.dense(1, 4) == [F.zero, F.rational(-1, 2), F.zero, F.rational(-1, 2)]

    def test_s1_has_no_log(self, catalan, wave):
        """Test S_1 = u^2/2 + ..."""
        row = expand_wave_at_infinity(wave, 2)[1]
        assert row.log_x == catalan.field.zero
        assert row.series.coefficient(2) == catalan.field.rational(1, 2)

    def test_xbar_first_coefficients(self, catalan, engine):
        """Test psi-bar = 1 + (1/2 - 1/(2 hbar)) x^-2 + ..."""
        F = catalan.field
        xbar = wave_xbar_series(catalan, 2, engine)
        assert xbar.coefficients[0] == {0: F.one}
        assert xbar.laurent(1) == {-1: F.rational(-1, 2), 0: F.rational(1, 2)}
        assert xbar.laurent(2) == {
            -2: F.rational(1, 8),
            -1: F.rational(-3, 4),
            0: F.rational(11, 8),
            1: F.rational(-3, 4),
        }
        assert not xbar.coefficients[1] and not xbar.coefficients[3]

    def test_xbar_guard(self, catalan):
        """Test e_max >= 1"""
        with pytest.raises(GuardError):
            wave_xbar_series(catalan, 0)

    def test_depth_guard(self, wave):
        """Test depth >= 1"""
        with pytest.raises(GuardError):
            expand_wave_at_infinity(wave, 0)


class TestFirstOrderWave:
    """Test the first-order example"""

    def test_exponent(self):
        """Test S_0 = log(x - 1) + log(x + 1) and S_k = 0"""
        wave = first_order_wave([1, -1], 3)
        assert wave.derivative(0) == wave.curve.y
        assert all(term.is_zero for term in wave.terms[1:])
        assert wave.order == 3

    def test_needs_lambdas(self):
        """Test an empty lambda list"""
        with pytest.raises(QuantumCurveError):
            first_order_wave([], 2)
