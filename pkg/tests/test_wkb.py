"""
Tests for wkb module
"""

import pytest
import sympy

from quantum_curves.curve import SpectralCurve, load_curve
from quantum_curves.errors import CheckFailure, CurveError, GuardError, QuantumCurveError
from quantum_curves.field import Field
from quantum_curves.logfunc import LogAugmentedFunction
from quantum_curves.operators import conjugate_operator, load_operator, parse_operator_file
from quantum_curves.rational import RationalFunction
from quantum_curves.recursion import TopologicalRecursion
from quantum_curves.wave import WaveExpansion, first_order_wave, wave_expansion
from quantum_curves.wkb import (
    ResidualLedger,
    difference_wkb_check,
    reconstruct_operator,
    verify_quantum_curve,
    wkb_solve,
)

z = sympy.Symbol("z")
F = Field()


def rf(expr, symbol="z"):
    return RationalFunction.from_sympy(expr, F, symbol)


def line_curve(y_expr, name="line"):
    """x = z with the given y."""
    return SpectralCurve(
        name=name,
        parameter="z",
        x=RationalFunction.variable(F, "z"),
        y=LogAugmentedFunction.from_rational(rf(y_expr)),
        field=F,
    )


@pytest.fixture(scope="module")
def catalan():
    return load_curve("catalan")


@pytest.fixture(scope="module")
def catalan_op():
    return load_operator("catalan")


@pytest.fixture(scope="module")
def engine(catalan):
    return TopologicalRecursion(catalan)


@pytest.fixture(scope="module")
def wave(catalan, engine):
    return wave_expansion(catalan, 3, engine)


@pytest.fixture(scope="module")
def gw():
    curve = load_curve("gw")
    return curve, TopologicalRecursion(curve)


class TestWKBSolve:
    """Test the triangular solve"""

    def test_first_correction(self, catalan, catalan_op):
        """Test dS_1/dx = -y^3/(y^2 - 1)^2 = -z/(z^2 - 1)^2"""
        system = wkb_solve(catalan_op, catalan, 1)
        assert system.derivatives[1].as_rational() == rf(-z / (z**2 - 1) ** 2)
        y = 1 / z
        assert system.derivatives[1].as_rational() == rf(-(y**3) / (y**2 - 1) ** 2)

    def test_classical_order(self, catalan, catalan_op):
        """Test K = 0 returns y with a zero residual"""
        system = wkb_solve(catalan_op, catalan, 0)
        assert system.derivatives == (catalan.y,)
        assert system.ledger.is_zero

    def test_matches_recursion_wave(self, catalan, catalan_op, wave):
        """Test dS_k/dx agree with the recursion wave for k <= 3"""
        system = wkb_solve(catalan_op, catalan, 3)
        for k in range(4):
            assert system.derivatives[k] == wave.derivative(k)

    def test_poles_at_zeros_of_dx(self, catalan, catalan_op):
        """Test dS_k/dx for 2 <= k <= 4 has poles only at z = +-1"""
        system = wkb_solve(catalan_op, catalan, 4)
        for k in range(2, 5):
            denominator = sympy.denom(system.derivatives[k].as_rational().to_sympy())
            assert set(sympy.roots(sympy.Poly(denominator, z))) <= {1, -1}

    def test_semiclassical_mismatch(self, catalan):
        """Test an operator for another curve"""
        op = parse_operator_file("hbar^0 : y^2 + x*y + 1")
        with pytest.raises(CheckFailure, match="does not quantise catalan"):
            wkb_solve(op, catalan, 2)

    def test_degenerate_slope(self):
        """Test dP/dy = 0 on the curve"""
        op = parse_operator_file("hbar^0 : y^2")
        with pytest.raises(CurveError, match="dP/dy vanishes"):
            wkb_solve(op, line_curve(sympy.Integer(0)), 1)

    def test_gw_classical_limit(self, gw):
        """Test e^{S_0'} + e^{-S_0'} - x = 0 on x = z + 1/z"""
        curve, _ = gw
        system = wkb_solve(load_operator("gw"), curve, 0)
        assert system.ledger.is_zero

    def test_gw_higher_orders(self, gw):
        """Test the difference solve leaves no residual"""
        curve, _ = gw
        assert wkb_solve(load_operator("gw"), curve, 2).ledger.is_zero

    def test_order_guard(self, catalan, catalan_op):
        """Test K above the limit"""
        with pytest.raises(GuardError, match="K must be between"):
            wkb_solve(catalan_op, catalan, 9)


class TestVerifyQuantumCurve:
    """Test the operator against recursion waves"""

    def test_catalan(self, catalan_op, wave):
        """Test the Catalan operator through hbar^3"""
        ledger = verify_quantum_curve(catalan_op, wave)
        assert ledger.is_zero
        assert len(ledger.residuals) == 4

    @pytest.mark.slow
    def test_catalan_fourth_order(self, catalan, catalan_op, engine):
        """Test the Catalan operator through hbar^4"""
        assert verify_quantum_curve(catalan_op, wave_expansion(catalan, 4, engine)).is_zero

    def test_wrong_sign(self, wave):
        """Test a sign flip on the x term fails at hbar^0"""
        op = parse_operator_file("hbar^0 : y^2 + x*y + 1")
        ledger = verify_quantum_curve(op, wave, 2)
        assert ledger.first_nonzero() == 0
        with pytest.raises(CheckFailure, match="fails at hbar\\^0"):
            ledger.require_zero()

    def test_flavour_mismatch(self, wave):
        """Test a shift operator on a rational y"""
        with pytest.raises(QuantumCurveError, match="flavour mismatch"):
            verify_quantum_curve(load_operator("gw"), wave, 1)

    def test_log_y_mismatch(self, gw, catalan_op):
        """Test a differential operator on y = log z"""
        curve, engine = gw
        with pytest.raises(QuantumCurveError, match="flavour mismatch"):
            verify_quantum_curve(catalan_op, wave_expansion(curve, 0, engine))

    def test_beyond_wave(self, catalan_op, wave):
        """Test K larger than the wave"""
        with pytest.raises(GuardError, match="known through S_3"):
            verify_quantum_curve(catalan_op, wave, 4)

    def test_first_order_example(self):
        """Test (x^2 - 1) y - 2x annihilates (x^2 - 1)^{1/hbar}"""
        op = load_operator("first_order")
        assert verify_quantum_curve(op, first_order_wave([1, -1], 3)).is_zero

    def test_conjugation_covariance(self, catalan, catalan_op, wave):
        """Test e^{x^2/(2 hbar)} psi is annihilated by the conjugated operator"""
        g = rf(sympy.Symbol("x") ** 2 / 2, "x")
        conjugated = conjugate_operator(catalan_op, g)
        shifted = wave.with_exponent(rf(z**2 / 2), "catalan_shifted")
        assert verify_quantum_curve(conjugated, shifted).is_zero
        assert not verify_quantum_curve(catalan_op, shifted).is_zero


class TestDifferenceCheck:
    """Test the GW(P^1) difference operator"""

    def test_half(self, gw):
        """Test q = 1, t = 1/2 through hbar^2"""
        curve, engine = gw
        assert difference_wkb_check(load_operator("gw"), curve, 2, engine=engine).is_zero

    @pytest.mark.slow
    def test_half_third_order(self, gw):
        """Test q = 1, t = 1/2 through hbar^3"""
        curve, engine = gw
        assert difference_wkb_check(load_operator("gw"), curve, 3, engine=engine).is_zero

    def test_other_t(self, gw):
        """Test t = 3/2 with the (t - 1/2) hbar term"""
        curve, engine = gw
        op = parse_operator_file("const q = 1\nconst t = 3/2\nhbar^0 : Yp + q*Ym - x\nhbar^1 : t - 1/2")
        assert difference_wkb_check(op, curve, 2, engine=engine).is_zero

    def test_missing_t_term(self, gw):
        """Test dropping the t term at t = 3/2 fails at hbar^1"""
        curve, engine = gw
        op = parse_operator_file("hbar^0 : Yp + Ym - x")
        ledger = difference_wkb_check(op, curve, 2, t="3/2", engine=engine)
        assert ledger.first_nonzero() == 1

    def test_differential_rejected(self, catalan, catalan_op):
        """Test a differential operator"""
        with pytest.raises(QuantumCurveError, match="not of difference flavour"):
            difference_wkb_check(catalan_op, catalan, 1)


class TestReconstruction:
    """Test operators recovered from waves"""

    def test_first_order_example(self):
        """Test S_0 = log x gives x y - 1 with no corrections"""
        result = reconstruct_operator(first_order_wave([0], 2), (1, 1))
        assert result.operator == parse_operator_file("hbar^0 : x*y - 1")
        assert result.solution_dimension == 1
        assert result.supports == (2, 0, 0)

    def test_catalan(self, wave):
        """Test the Catalan wave gives y^2 - xy + 1"""
        result = reconstruct_operator(wave, (1, 2), 2)
        assert result.operator == load_operator("catalan")
        assert result.solution_dimension == 1

    def test_gaussian(self):
        """Test S_0 = x^2/2 gives y - x"""
        curve = line_curve(z, "gaussian")
        zero = LogAugmentedFunction.zero(F)
        s0 = LogAugmentedFunction.from_rational(rf(z**2 / 2))
        wave = WaveExpansion(curve, (s0, zero, zero), primitive="closed")
        assert reconstruct_operator(wave, (1, 1)).operator == parse_operator_file("hbar^0 : y - x")

    def test_round_trip(self, catalan, catalan_op):
        """Test reconstruction inverts the WKB solve"""
        solved = wkb_solve(catalan_op, catalan, 2).to_wave()
        assert reconstruct_operator(solved, (1, 2)).operator == catalan_op

    def test_supplied_classical_part(self, wave, catalan_op):
        """Test a given P_0"""
        result = reconstruct_operator(wave, (1, 2), 1, p0=catalan_op)
        assert result.operator == catalan_op

    def test_classical_part_off_curve(self, wave):
        """Test a P_0 that does not vanish on the curve"""
        with pytest.raises(CheckFailure, match="P_0 of"):
            reconstruct_operator(wave, (1, 2), 1, p0=parse_operator_file("hbar^0 : y - x"))

    def test_no_correction(self, catalan, catalan_op, wave):
        """Test a wave with S_1 removed has no polynomial correction"""
        zero = LogAugmentedFunction.zero(F)
        broken = WaveExpansion(catalan, (wave[0], zero), primitive="closed")
        with pytest.raises(CheckFailure, match="no correction P_1"):
            reconstruct_operator(broken, (1, 2), 1, p0=catalan_op)

    def test_support_guard(self, wave):
        """Test 20 monomials exceed the search limit"""
        with pytest.raises(GuardError, match="2\\^16"):
            reconstruct_operator(wave, (4, 3), 1)

    def test_negative_bounds(self, wave):
        """Test negative degree bounds"""
        with pytest.raises(GuardError, match="must be >= 0"):
            reconstruct_operator(wave, (-1, 2), 1)


class TestResidualLedger:
    """Test ledger reporting"""

    def test_rows(self):
        """Test one row per order"""
        ledger = ResidualLedger("demo", F, (rf(sympy.Integer(0)), rf(1 / z)))
        assert ledger.rows() == [
            {"order": "hbar^0", "residual": "0"},
            {"order": "hbar^1", "residual": "1/z"},
        ]
        assert ledger.first_nonzero() == 1
        assert not ledger.is_zero
