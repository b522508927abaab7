"""
Tests for identities module
"""

import pytest
import sympy

from quantum_curves.curve import load_curve
from quantum_curves.errors import CheckFailure, CurveError, GuardError
from quantum_curves.identities import (
    IdentityResidual,
    airy_scaling_check,
    check_dilaton,
    check_loop_equation,
    check_string,
    free_energy,
    invariance_residuals,
    shift_curve,
    stable_pairs,
)
from quantum_curves.rational import RationalFunction
from quantum_curves.recursion import PoleBasisIndex, TopologicalRecursion

z = sympy.Symbol("z")


@pytest.fixture(scope="module")
def catalan():
    return load_curve("catalan")


@pytest.fixture(scope="module")
def engine(catalan):
    return TopologicalRecursion(catalan)


@pytest.fixture(scope="module")
def displayed(catalan):
    return TopologicalRecursion(catalan, convention="displayed")


class TestStablePairs:
    """Test enumeration of stable (g, n)"""

    def test_up_to_two(self):
        """Test 2g - 2 + n <= 2"""
        assert list(stable_pairs(2)) == [(0, 3), (1, 1), (0, 4), (1, 2)]

    def test_lower_limit(self):
        """Test chi_min skips the smallest pairs"""
        assert list(stable_pairs(3, chi_min=3)) == [(0, 5), (1, 3), (2, 1)]


class TestStringEquation:
    """Test the string equations on the Catalan curve"""

    @pytest.mark.parametrize("g,n,m", [(1, 1, 0), (0, 3, 1), (1, 1, 1), (0, 3, 0)])
    def test_holds(self, catalan, engine, g, n, m):
        """Test the residual vanishes"""
        residual = check_string(catalan, g, n, m, engine)
        assert residual.is_zero, residual.format()

    def test_displayed_convention(self, catalan, displayed):
        """Test the displayed kernel with the opposite sign"""
        assert check_string(catalan, 1, 1, 0, displayed).is_zero

    def test_m_out_of_range(self, catalan, engine):
        """Test m = 2"""
        with pytest.raises(GuardError, match="m must be 0 or 1"):
            check_string(catalan, 1, 1, 2, engine)

    def test_unstable(self, catalan, engine):
        """Test (g, n) = (0, 2)"""
        with pytest.raises(GuardError, match="not stable"):
            check_string(catalan, 0, 2, 0, engine)


class TestDilatonEquation:
    """Test the dilaton equation and free energies"""

    @pytest.mark.parametrize("g,n", [(1, 1), (0, 3)])
    def test_holds(self, catalan, engine, g, n):
        """Test the residual vanishes"""
        assert check_dilaton(catalan, g, n, engine).is_zero

    def test_displayed_convention(self, catalan, displayed):
        """Test the displayed kernel"""
        assert check_dilaton(catalan, 1, 1, displayed).is_zero

    def test_antiderivative_shift(self, catalan, engine):
        """Test a constant added to Phi changes nothing"""
        shift = catalan.field.convert(7)
        assert check_dilaton(catalan, 1, 1, engine, shift).is_zero

    def test_airy_f1(self):
        """Test F_1 = -1/24 on the Airy curve"""
        curve = load_curve("airy")
        assert free_energy(curve, 1) == curve.field.rational(-1, 24)

    def test_airy_f2_vanishes(self):
        """Test F_2 = 0 on the Airy curve"""
        curve = load_curve("airy")
        assert free_energy(curve, 2) == curve.field.zero

    def test_catalan_f1(self, catalan, engine):
        """Test F_1 = -1/12 on the Catalan curve, independent of the constant"""
        F = catalan.field
        assert free_energy(catalan, 1, engine) == F.rational(-1, 12)
        assert free_energy(catalan, 1, engine, F.convert(3)) == F.rational(-1, 12)

    def test_free_energy_convention_independent(self, catalan, displayed):
        """Test F_g is read in the quantum normalisation"""
        assert free_energy(catalan, 1, displayed) == catalan.field.rational(-1, 12)

    def test_genus_zero(self, catalan, engine):
        """Test g = 0 is rejected"""
        with pytest.raises(GuardError, match="g >= 1"):
            free_energy(catalan, 0, engine)


class TestAiryScaling:
    """Test the local Airy model at each Catalan branch point"""

    @pytest.mark.parametrize("g,n", [(1, 1), (0, 3), (1, 2)])
    def test_top_degree(self, catalan, engine, g, n):
        """Test the top-degree coefficients rescale the Airy values"""
        assert airy_scaling_check(catalan, g, n, engine).is_zero

    @pytest.mark.slow
    def test_genus_two(self, catalan, engine):
        """Test omega^2_1"""
        assert airy_scaling_check(catalan, 2, 1, engine).is_zero

    def test_top_coefficient(self, engine):
        """Test the pole of order 4 of omega^1_1 at z = 1 is 1/16"""
        assert engine.omega(1, 1).coefficient((1, 3)) == engine.field.rational(1, 16)


class TestInvariance:
    """Test y -> y + g'(x)"""

    def test_shifted_curve(self, catalan):
        """Test g = x^2/2 gives y = z + 2/z"""
        g = RationalFunction.from_sympy(z**2 / 2, catalan.field)
        assert shift_curve(catalan, g).y == load_curve("catalan_shifted").y

    def test_invariants_unchanged(self, catalan, engine):
        """Test every omega with 2g - 2 + n <= 2 is unchanged"""
        g = RationalFunction.from_sympy(z**2 / 2, catalan.field)
        residuals = invariance_residuals(catalan, g, 2, engine)
        assert len(residuals) == 4
        assert all(r.is_zero for r in residuals)


class TestLoopEquation:
    """Test the specialised loop equation"""

    @pytest.mark.parametrize("g,n", [(0, 3), (1, 1), (0, 4), (1, 2)])
    def test_holds(self, catalan, engine, g, n):
        """Test the residual vanishes"""
        assert check_loop_equation(catalan, g, n, engine).is_zero

    def test_other_curve(self):
        """Test the Airy curve is rejected"""
        with pytest.raises(CurveError, match="Catalan curve only"):
            check_loop_equation(load_curve("airy"), 1, 1)


class TestIdentityResidual:
    """Test residual reporting"""

    def make(self, terms):
        F = load_curve("catalan").field
        return IdentityResidual("demo", 1, 1, F, (F.convert(-1), F.one), terms)

    def test_zero(self):
        """Test an empty residual passes"""
        residual = self.make({})
        assert residual.require_zero() is residual
        assert residual.format() == "0"

    def test_nonzero(self):
        """Test a nonzero residual raises with its printed form"""
        F = load_curve("catalan").field
        residual = self.make({(PoleBasisIndex(1, 2), PoleBasisIndex(-1, 3)): F.rational(1, 2)})
        assert residual.format() == "(1/2)*[1:2] z^3"
        with pytest.raises(CheckFailure, match="demo fails"):
            residual.require_zero()
