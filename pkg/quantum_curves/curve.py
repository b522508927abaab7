"""
Spectral curves

A rational spectral curve is given by x(z) and y(z) in one global parameter z,
with the Cauchy kernel dz₁dz₂/(z₁ − z₂)² as bidifferential. Curve files are
plain text:

    # comment
    param = z
    const q = 1
    x = z + q/z
    y = log(z)

`validate_curve` finds the zeros of dx, extending ℚ by one square root when
the branch points need it, and checks that the recursion can run there.
"""

import logging
import threading
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict

from .errors import CurveError, QuantumCurveError
from .field import Field, FieldElement, field_for_quadratic, squarefree_part
from .logfunc import LocalExpansion, LogAugmentedFunction
from .parser import parse_constant, parse_expr
from .rational import RationalFunction
from .series import LaurentSeries, series_expand, series_log

logger = logging.getLogger(__name__)

CURVES_DIR = Path(__file__).parent / "curves"

BUNDLED_CURVES: Dict[str, str] = {
    "catalan": "catalan.curve",
    "catalan_shifted": "catalan_shifted.curve",
    "airy": "airy.curve",
    "gw": "gw.curve",
}


class SpectralCurve(BaseModel):
    """
    Input data (C, B, x, y) for a rational curve C with parameter z.

    Constants declared in the file are substituted at parse time and kept
    only for printing.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    parameter: str
    x: RationalFunction
    y: LogAugmentedFunction
    field: Field
    constants: Dict[str, str] = {}

    @property
    def x_prime(self) -> RationalFunction:
        return self.x.diff()

    def with_y(self, y: LogAugmentedFunction, name: Optional[str] = None) -> "SpectralCurve":
        return self.model_copy(update={"y": y, "name": name or self.name})

    def format(self) -> str:
        """Curve-file text; parse_curve reads it back to the same x and y."""
        lines = [f"param = {self.parameter}"]
        lines.extend(f"const {k} = {v}" for k, v in self.constants.items())
        lines.append(f"x = {self.x.format()}")
        lines.append(f"y = {self.y.format()}")
        return "\n".join(lines) + "\n"


def _read_lines(text: str) -> Tuple[str, List[Tuple[str, str]], Dict[str, str]]:
    parameter = "z"
    constants: List[Tuple[str, str]] = []
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CurveError(f"line {number}: expected 'name = value', got {raw.strip()!r}")
        key, value = key.strip(), value.strip()
        if key == "param":
            if not value.isidentifier():
                raise CurveError(f"line {number}: parameter name {value!r} is not an identifier")
            parameter = value
        elif key.startswith("const "):
            name = key[len("const "):].strip()
            if not name.isidentifier():
                raise CurveError(f"line {number}: constant name {name!r} is not an identifier")
            constants.append((name, value))
        elif key in ("x", "y"):
            if key in values:
                raise CurveError(f"line {number}: {key} is defined twice")
            values[key] = value
        else:
            raise CurveError(f"line {number}: unknown key {key!r}")
    for key in ("x", "y"):
        if key not in values:
            raise CurveError(f"curve file has no '{key} = ...' line")
    return parameter, constants, values


def _build(
    name: str, parameter: str, constants: List[Tuple[str, str]], values: Dict[str, str], field: Field
) -> SpectralCurve:
    resolved: Dict[str, FieldElement] = {}
    for const_name, text in constants:
        resolved[const_name] = parse_constant(text, field, resolved)
    x = parse_expr(values["x"], parameter, field, resolved)
    y = parse_expr(values["y"], parameter, field, resolved)
    if not x.is_rational:
        raise CurveError("x must be a rational function of the parameter")
    if x.rational.is_constant:
        raise CurveError("x is constant")
    if y.is_zero:
        raise CurveError("y is identically zero")
    return SpectralCurve(
        name=name,
        parameter=parameter,
        x=x.rational,
        y=y,
        field=field,
        constants={k: field.format(v) for k, v in resolved.items()},
    )


def _discriminant(factor: RationalFunction) -> int:
    c0, c1, c2 = factor.coefficients()
    disc = c1 * c1 - 4 * c0 * c2
    return squarefree_part(int(disc.numerator) * int(disc.denominator))


def parse_curve(text: str, name: str = "curve", extension: Optional[int] = None) -> SpectralCurve:
    """
    Parse curve-file text.

    Args:
        text: curve file contents
        name: label carried into reports
        extension: square-free d to work over ℚ(√d), or None to detect it

    Returns:
        SpectralCurve over the smallest field containing every branch point
    """
    parameter, constants, values = _read_lines(text)
    base = Field(extension) if extension not in (None, 1) else Field()
    curve = _build(name, parameter, constants, values, base)
    if base.is_extension:
        return curve
    discriminants = []
    for factor, e in curve.x_prime.factor()[1]:
        if e > 0 and factor.numer_degree() == 2:
            discriminants.append(_discriminant(factor))
    target = field_for_quadratic(discriminants, extension)
    if target == base:
        return curve
    logger.info("curve %s needs %r for its branch points", name, target)
    return _build(name, parameter, constants, values, target)


def load_curve(source: Union[str, Path], extension: Optional[int] = None) -> SpectralCurve:
    """
    Load a curve file by path, or one of the bundled curves by name
    ("catalan") or file name ("catalan.curve").
    """
    if isinstance(source, str) and source in BUNDLED_CURVES:
        path = CURVES_DIR / BUNDLED_CURVES[source]
    else:
        path = Path(source)
        if not path.is_file() and str(source) in BUNDLED_CURVES.values():
            path = CURVES_DIR / str(source)
    if not path.is_file():
        raise QuantumCurveError(f"curve file not found: {source}")
    return parse_curve(path.read_text(), name=path.stem, extension=extension)


@dataclass(frozen=True)
class BranchPoint:
    """A simple zero α of dx with the leading local coefficients of x and y."""

    index: int
    alpha: FieldElement
    x2: FieldElement
    y1: FieldElement
    label: str


@dataclass
class BranchData:
    """
    Validated branch points of a curve with cached local expansions.

    Series are computed on demand at the largest order asked for so far and
    truncated for smaller requests; the caches are guarded by a lock so one
    instance can be shared between threads.
    """

    curve: SpectralCurve
    points: Tuple[BranchPoint, ...]
    _cache: Dict[tuple, object] = dataclass_field(default_factory=dict, repr=False)
    _lock: threading.RLock = dataclass_field(default_factory=threading.RLock, repr=False)

    @property
    def field(self) -> Field:
        return self.curve.field

    @property
    def alphas(self) -> List[FieldElement]:
        return [p.alpha for p in self.points]

    def index_of(self, alpha: FieldElement) -> int:
        alpha = self.field.convert(alpha) if isinstance(alpha, int) else alpha
        for point in self.points:
            if point.alpha == alpha:
                return point.index
        raise CurveError(f"{self.field.format(alpha)} is not a validated branch point")

    def cached(self, key: tuple, order: int, build):
        with self._lock:
            hit = self._cache.get(key)
            if hit is not None and hit[0] >= order:
                logger.debug("cache hit %s at order %d", key, order)
                return hit[1]
        value = build()
        with self._lock:
            self._cache[key] = (order, value)
        return value

    def x_series(self, index: int, order: int) -> LaurentSeries:
        """x(α + s) through s^order."""
        alpha = self.points[index].alpha
        return self.cached(
            ("x", index), order, lambda: series_expand(self.curve.x, alpha, order)
        ).truncate(order)

    def x_prime_series(self, index: int, order: int) -> LaurentSeries:
        alpha = self.points[index].alpha
        return self.cached(
            ("dx", index), order, lambda: series_expand(self.curve.x_prime, alpha, order)
        ).truncate(order)

    def y_local(self, index: int, order: int) -> LocalExpansion:
        """y(α + s) with its symbolic log constants."""
        alpha = self.points[index].alpha
        local = self.cached(("y", index), order, lambda: self.curve.y.series_at(alpha, order))
        return LocalExpansion(
            local.series.truncate(order),
            tuple((v, c.truncate(order)) for v, c in local.log_constants),
        )

    def deck(self, index: int, order: int) -> LaurentSeries:
        """σ_α(s) through s^order."""
        if order < 1:
            raise QuantumCurveError(f"deck transform needs order >= 1, got {order}")
        return self.cached(
            ("deck", index), order, lambda: _solve_deck(self, index, order)
        ).truncate(order)


def _sort_key(field: Field, alpha: FieldElement):
    return field.parts(alpha)


def validate_curve(curve: SpectralCurve) -> BranchData:
    """
    Find the zeros of dx and check the requirements of the recursion.

    Raises:
        CurveError: a zero of dx is not simple, lies outside the working
            field, coincides with a zero or pole of y, or dx vanishes at ∞
    """
    field = curve.field
    x_prime = curve.x_prime
    if x_prime.numer_degree() - x_prime.denom_degree() <= -3:
        raise CurveError("dx vanishes at z = infinity")
    _, factors = x_prime.factor()
    alphas = []
    for factor, e in factors:
        if e < 0:
            continue
        if factor.numer_degree() != 1:
            raise CurveError(
                f"zero of dx outside the working field {field!r} "
                f"(irreducible factor {factor.format()})"
            )
        alpha = factor.linear_root()
        if e > 1:
            raise CurveError(f"zero of dx at {field.format(alpha)} has multiplicity {e}")
        alphas.append(alpha)
    if not alphas:
        raise CurveError("dx has no zeros; the recursion has nothing to sum over")
    alphas.sort(key=lambda a: _sort_key(field, a))

    points = []
    for index, alpha in enumerate(alphas):
        label = field.format(alpha)
        x_local = series_expand(curve.x, alpha, 2)
        try:
            y_local = curve.y.series_at(alpha, 1)
        except CurveError as exc:
            raise CurveError(f"y is not analytic at the branch point {label}: {exc}") from None
        if not y_local.series.is_zero and y_local.series.valuation < 0:
            raise CurveError(f"y has a pole at the branch point {label}")
        for value, coefficient in y_local.log_constants:
            if coefficient._get(1):
                raise CurveError(
                    f"dy at {label} involves the constant log({field.format(value)})"
                )
        y1 = y_local.series._get(1)
        if not y1:
            raise CurveError(f"dy vanishes at the branch point {label}")
        points.append(BranchPoint(index, alpha, x_local._get(2), y1, label))
        logger.debug(
            "branch point %s: x2 = %s, y1 = %s",
            label,
            field.format(x_local._get(2)),
            field.format(y1),
        )
    logger.info("curve %s: %d branch points %s", curve.name, len(points), [p.label for p in points])
    return BranchData(curve, tuple(points))


def _solve_deck(data: BranchData, index: int, order: int) -> LaurentSeries:
    """
    Solve x(α + σ) = x(α + s) with σ = −s + O(s²).

    Writing x(α + s) − x(α) = x₂·r(s)² with r = s + O(s²), the involution is
    σ = r⁻¹(−r(s)).
    """
    field = data.field
    point = data.points[index]
    X = data.x_series(index, order + 2) - data.curve.x.evaluate(point.alpha)
    if X.valuation != 2:
        raise CurveError(f"dx does not have a simple zero at {point.label}")
    unit = X.shift(-2).scale(field.one / point.x2)
    r = series_log(unit).scale(field.rational(1, 2)).exp().shift(1)
    sigma = r.revert().compose(-r).truncate(order)
    logger.debug("deck transform at %s through s^%d", point.label, order)
    return sigma


def deck_transform(curve: SpectralCurve, alpha: FieldElement, order: int) -> LaurentSeries:
    """
    Local deck transformation at a branch point α, as a series in s = z − α.

    Example:
        On x = z + 1/z at α = 1 the result is −s + s² − s³ + s⁴ + O(s⁵).
    """
    if order < 1:
        raise QuantumCurveError(f"deck transform needs order >= 1, got {order}")
    data = validate_curve(curve)
    return data.deck(data.index_of(alpha), order)
