"""
Exact scalar fields

All scalars live in ℚ or in a single quadratic extension ℚ(√d). The field
object wraps the corresponding sympy domain and is the only place that knows
how to build, test and print its elements, so the rest of the package can
treat elements as opaque values supporting + - * and `field.one / a`.
"""

import logging
from fractions import Fraction
from typing import Any, Iterable, Optional

import sympy
from sympy import QQ
from sympy.polys.rings import ring as poly_ring

from .errors import CurveError, QuantumCurveError

logger = logging.getLogger(__name__)

FieldElement = Any


def squarefree_part(n: int) -> int:
    """
    Square-free part of a nonzero integer, keeping the sign.

    Example:
        >>> squarefree_part(-12)
        -3
    """
    if n == 0:
        raise QuantumCurveError("square-free part of 0 is undefined")
    sign = -1 if n < 0 else 1
    part = 1
    for prime, power in sympy.factorint(abs(n)).items():
        if power % 2:
            part *= prime
    return sign * part


class Field:
    """
    ℚ, or ℚ(√d) for a fixed square-free integer d ≠ 1.

    Args:
        d: square-free integer selecting the extension, or None for ℚ
    """

    def __init__(self, d: Optional[int] = None):
        if d is not None:
            d = int(d)
            if d == 1 or squarefree_part(d) != d:
                raise QuantumCurveError(f"extension needs a square-free integer d != 1, got {d}")
            self.domain = QQ.algebraic_field(sympy.sqrt(d))
        else:
            self.domain = QQ
        self.d = d
        self.zero = self.domain.zero
        self.one = self.domain.one
        self._rings = {}

    @property
    def is_extension(self) -> bool:
        return self.d is not None

    def __repr__(self) -> str:
        return "QQ" if self.d is None else f"QQ(sqrt({self.d}))"

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.d == self.d

    def __hash__(self) -> int:
        return hash(("Field", self.d))

    def __call__(self, value) -> FieldElement:
        return self.convert(value)

    def convert(self, value) -> FieldElement:
        """Bring an int, Fraction, sympy number or element of ℚ into this field."""
        if isinstance(value, Fraction):
            value = QQ(value.numerator, value.denominator)
        elif isinstance(value, int):
            value = QQ(value)
        elif isinstance(value, sympy.Basic):
            return self.domain.from_sympy(value)
        if self.d is None:
            return QQ.convert(value)
        if isinstance(value, type(self.one)):
            return value
        return self.domain.convert_from(QQ.convert(value), QQ)

    def rational(self, numerator: int, denominator: int = 1) -> FieldElement:
        if denominator == 0:
            raise QuantumCurveError("zero denominator")
        return self.convert(QQ(numerator, denominator))

    def sqrt_d(self) -> FieldElement:
        if self.d is None:
            raise QuantumCurveError("the rational field has no square root generator")
        return self.domain.from_sympy(sympy.sqrt(self.d))

    def is_rational(self, a: FieldElement) -> bool:
        if self.d is None:
            return True
        return a.is_ground

    def to_rational(self, a: FieldElement):
        """Return `a` as an element of QQ; raises if it involves √d."""
        if self.d is None:
            return a
        if not a.is_ground:
            raise QuantumCurveError(f"{self.format(a)} is not rational")
        coeffs = a.to_list()
        return QQ.convert(coeffs[-1]) if coeffs else QQ.zero

    def parts(self, a: FieldElement):
        """Split a into (rational part, coefficient of √d)."""
        if self.d is None:
            return a, QQ.zero
        coeffs = [QQ.convert(c) for c in a.to_list()]
        if not coeffs:
            return QQ.zero, QQ.zero
        if len(coeffs) == 1:
            return coeffs[0], QQ.zero
        return coeffs[1], coeffs[0]

    def to_sympy(self, a: FieldElement) -> sympy.Expr:
        return self.domain.to_sympy(a)

    def format(self, a: FieldElement) -> str:
        """Print as "p/q", "p", or "a + b*sqrt(d)"."""
        rational, root = self.parts(a)
        if not root:
            return _format_rational(rational)
        root_text = f"sqrt({self.d})"
        if root == QQ.one:
            tail = root_text
        elif root == -QQ.one:
            tail = f"-{root_text}"
        else:
            tail = f"{_format_rational(root)}*{root_text}"
        if not rational:
            return tail
        if tail.startswith("-"):
            return f"{_format_rational(rational)} - {tail[1:]}"
        return f"{_format_rational(rational)} + {tail}"

    def parse(self, text: str) -> FieldElement:
        """Inverse of `format` for rationals and sqrt(d) combinations."""
        text = text.strip()
        try:
            value = sympy.sympify(text, rational=True)
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise QuantumCurveError(f"not an exact number: {text!r}") from exc
        if not value.is_number:
            raise QuantumCurveError(f"not an exact number: {text!r}")
        try:
            return self.domain.from_sympy(value)
        except Exception as exc:  # sympy raises CoercionFailed or NotAlgebraic
            raise QuantumCurveError(f"{text!r} does not lie in {self!r}") from exc

    def ring(self, symbol: str):
        """Univariate sparse polynomial ring over this field, cached per symbol."""
        if symbol not in self._rings:
            R, gen = poly_ring(symbol, self.domain)
            self._rings[symbol] = (R, gen)
        return self._rings[symbol]

    def sum(self, values: Iterable[FieldElement]) -> FieldElement:
        total = self.zero
        for value in values:
            total += value
        return total


def _format_rational(q) -> str:
    q = QQ.convert(q)
    numerator, denominator = int(q.numerator), int(q.denominator)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def field_for_quadratic(discriminants: Iterable[int], requested: Optional[int] = None) -> Field:
    """
    Pick the working field for a set of quadratic discriminants.

    Args:
        discriminants: discriminants of irreducible quadratic factors that must split
        requested: explicit extension d from the caller, or None for auto-detection

    Returns:
        Field in which every discriminant is a square
    """
    parts = {squarefree_part(int(disc)) for disc in discriminants}
    parts.discard(1)
    if requested is not None:
        requested = squarefree_part(int(requested))
        bad = [p for p in parts if p != requested]
        if bad:
            raise CurveError(
                f"branch points need sqrt({bad[0]}), outside the requested field QQ(sqrt({requested}))"
            )
        return Field(requested if requested != 1 else None)
    if len(parts) > 1:
        raise CurveError(f"branch points need several square roots {sorted(parts)}")
    if parts:
        d = parts.pop()
        logger.debug("working field extended by sqrt(%d)", d)
        return Field(d)
    return Field()
