"""
Tests for curve module
"""

import pytest

from quantum_curves.curve import (
    BUNDLED_CURVES,
    deck_transform,
    load_curve,
    parse_curve,
    validate_curve,
)
from quantum_curves.errors import CurveError, QuantumCurveError
from quantum_curves.field import Field


@pytest.fixture
def catalan():
    return load_curve("catalan")


def curve_text(x: str, y: str) -> str:
    return f"param = z\nx = {x}\ny = {y}\n"


class TestCurveFiles:
    """Test curve-file parsing"""

    def test_bundled_curves_load(self):
        """Test every bundled curve parses and validates"""
        for name in BUNDLED_CURVES:
            curve = load_curve(name)
            assert curve.name == name
            validate_curve(curve)

    def test_comments_and_constants(self):
        """Test # comments and const lines"""
        curve = parse_curve("# gw\nparam = z\nconst q = 1\nx = z + q/z  # x\ny = log(z)\n")
        assert curve.constants == {"q": "1"}
        assert curve.x == load_curve("catalan").x

    def test_format_round_trip(self, catalan):
        """Test the printed curve reads back to the same functions"""
        again = parse_curve(catalan.format())
        assert again.x == catalan.x
        assert again.y == catalan.y

    def test_missing_y(self):
        """Test a file without y"""
        with pytest.raises(CurveError, match="no 'y = ...' line"):
            parse_curve("x = z\n")

    def test_unknown_key(self):
        """Test an unexpected key"""
        with pytest.raises(CurveError, match="unknown key"):
            parse_curve("x = z\ny = z\nw = 1\n")

    def test_duplicate_key(self):
        """Test x defined twice"""
        with pytest.raises(CurveError, match="defined twice"):
            parse_curve("x = z\nx = z^2\ny = z\n")

    def test_x_must_be_rational(self):
        """Test x = log(z)"""
        with pytest.raises(CurveError, match="x must be a rational function"):
            parse_curve(curve_text("log(z)", "z"))

    def test_missing_file(self):
        """Test an unknown path"""
        with pytest.raises(QuantumCurveError, match="curve file not found"):
            load_curve("no_such_curve.curve")


class TestValidateCurve:
    """Test branch point discovery and checks"""

    def test_catalan_branch_points(self, catalan):
        """Test x = z + 1/z has branch points -1 and 1"""
        data = validate_curve(catalan)
        F = catalan.field
        assert data.alphas == [F.convert(-1), F.one]
        point = data.points[1]
        assert point.x2 == F.one
        assert point.y1 == F.convert(-1)

    def test_airy_branch_point(self):
        """Test the Airy chart has one branch point at 0"""
        data = validate_curve(load_curve("airy"))
        assert data.alphas == [Field().zero]

    def test_double_zero(self):
        """Test x = z^3 has a double zero of dx"""
        with pytest.raises(CurveError, match="multiplicity 2"):
            validate_curve(parse_curve(curve_text("z^3", "z")))

    def test_extension_detected(self):
        """Test branch points at +-sqrt(2) extend the field"""
        curve = parse_curve(curve_text("z^3/3 - 2*z", "z"))
        assert curve.field == Field(2)
        data = validate_curve(curve)
        assert len(data.alphas) == 2

    def test_outside_requested_field(self):
        """Test branch points outside a requested extension"""
        curve = parse_curve(curve_text("z^3/3 - 2*z", "z"), extension=3)
        with pytest.raises(CurveError, match="outside the working field"):
            validate_curve(curve)

    def test_pole_of_y(self):
        """Test y with a pole at a branch point"""
        with pytest.raises(CurveError, match="pole at the branch point"):
            validate_curve(parse_curve(curve_text("z + 1/z", "1/(z - 1)")))

    def test_dy_vanishes(self):
        """Test dy = 0 at a branch point"""
        with pytest.raises(CurveError, match="dy vanishes"):
            validate_curve(parse_curve(curve_text("z + 1/z", "(z - 1)^2")))

    def test_dx_vanishes_at_infinity(self):
        """Test x = 1/z^2"""
        with pytest.raises(CurveError, match="infinity"):
            validate_curve(parse_curve(curve_text("1/z^2", "z")))

    def test_no_branch_points(self):
        """Test x = z has no zeros of dx"""
        with pytest.raises(CurveError, match="no zeros"):
            validate_curve(parse_curve(curve_text("z", "z^2")))

    def test_log_curve(self):
        """Test y = log(z) is analytic at z = -1 and z = 1"""
        data = validate_curve(load_curve("gw"))
        assert len(data.points) == 2


class TestDeckTransform:
    """Test the local involution"""

    def test_catalan(self, catalan):
        """Test sigma at z = 1 is 1/(1 + s) - 1"""
        F = catalan.field
        sigma = deck_transform(catalan, F.one, 4)
        assert sigma.dense(1, 4) == [F.convert(c) for c in (-1, 1, -1, 1)]

    def test_airy(self):
        """Test sigma(s) = -s exactly on the Airy chart"""
        curve = load_curve("airy")
        sigma = deck_transform(curve, curve.field.zero, 6)
        assert sigma.dense(1, 6) == [curve.field.convert(-1)] + [curve.field.zero] * 5

    def test_involution(self, catalan):
        """Test sigma(sigma(s)) = s and x(sigma) = x"""
        data = validate_curve(catalan)
        sigma = data.deck(0, 6)
        F = catalan.field
        assert sigma.compose(sigma).dense(1, 6) == [F.one] + [F.zero] * 5
        x = data.x_series(0, 6)
        assert (x.compose(sigma) - x).is_zero

    def test_unvalidated_point(self, catalan):
        """Test a point that is not a branch point"""
        with pytest.raises(CurveError, match="not a validated branch point"):
            deck_transform(catalan, catalan.field.convert(2), 3)

    def test_order_guard(self, catalan):
        """Test order >= 1"""
        with pytest.raises(QuantumCurveError, match="order >= 1"):
            deck_transform(catalan, catalan.field.one, 0)
