"""
Truncated Laurent series

A LaurentSeries knows its coefficients exactly through a stated order N and
nothing beyond it. Every binary operation returns the order that both
operands actually support, and asking for an unknown coefficient raises
PrecisionError instead of returning a guess.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

from .errors import PrecisionError, QuantumCurveError
from .field import Field, FieldElement
from .rational import RationalFunction

logger = logging.getLogger(__name__)


class _Infinity:
    __slots__ = ()

    def __repr__(self) -> str:
        return "oo"


INFINITY = _Infinity()


@dataclass(frozen=True)
class LaurentSeries:
    """
    Σ_{k=valuation}^{order} coeffs[k - valuation] s^k + O(s^{order+1}).

    The zero series has no coefficients and valuation order + 1.

    Attributes:
        field: scalar field of the coefficients
        valuation: lowest exponent with a nonzero coefficient
        coeffs: coefficients from the valuation up to the last nonzero one
        order: every coefficient of exponent <= order is exact
        center: expansion point label (field element, INFINITY or None)
    """

    field: Field
    valuation: int
    coeffs: Tuple[FieldElement, ...]
    order: int
    center: Any = None

    @classmethod
    def make(
        cls, field: Field, valuation: int, coeffs: Sequence, order: int, center: Any = None
    ) -> "LaurentSeries":
        coeffs = list(coeffs)
        keep = order - valuation + 1
        if keep < len(coeffs):
            coeffs = coeffs[: max(keep, 0)]
        start = 0
        while start < len(coeffs) and not coeffs[start]:
            start += 1
        coeffs = coeffs[start:]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        valuation = valuation + start if coeffs else order + 1
        return cls(field, valuation, tuple(coeffs), order, center)

    @classmethod
    def zero(cls, field: Field, order: int, center: Any = None) -> "LaurentSeries":
        return cls(field, order + 1, (), order, center)

    @classmethod
    def monomial(
        cls, field: Field, k: int, order: int, coefficient=None, center: Any = None
    ) -> "LaurentSeries":
        c = field.one if coefficient is None else field.convert(coefficient)
        return cls.make(field, k, [c], order, center)

    @classmethod
    def one(cls, field: Field, order: int, center: Any = None) -> "LaurentSeries":
        return cls.monomial(field, 0, order, center=center)

    # access -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def _get(self, k: int) -> FieldElement:
        i = k - self.valuation
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def coefficient(self, k: int) -> FieldElement:
        if k > self.order:
            raise PrecisionError(f"coefficient of s^{k} requested, series known through s^{self.order}")
        return self._get(k)

    def dense(self, start: int, stop: int) -> List[FieldElement]:
        """Coefficients of s^start .. s^stop inclusive."""
        if stop > self.order:
            raise PrecisionError(f"coefficients through s^{stop} requested, known through s^{self.order}")
        return [self._get(k) for k in range(start, stop + 1)]

    def residue(self) -> FieldElement:
        return self.coefficient(-1)

    def principal_part(self) -> Dict[int, FieldElement]:
        return {k: self._get(k) for k in range(self.valuation, 0) if self._get(k)}

    def truncate(self, order: int) -> "LaurentSeries":
        return LaurentSeries.make(
            self.field, self.valuation, self.coeffs, min(order, self.order), self.center
        )

    def items(self):
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.valuation + i, c

    # arithmetic -------------------------------------------------------

    def _is_series(self, other) -> bool:
        return isinstance(other, LaurentSeries)

    def __add__(self, other) -> "LaurentSeries":
        if not self._is_series(other):
            return self + LaurentSeries.monomial(self.field, 0, self.order, other, self.center)
        order = min(self.order, other.order)
        low = min(self.valuation, other.valuation)
        if low > order:
            return LaurentSeries.zero(self.field, order, self.center)
        coeffs = [self._get(k) + other._get(k) for k in range(low, order + 1)]
        return LaurentSeries.make(self.field, low, coeffs, order, self.center)

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(
            self.field, self.valuation, tuple(-c for c in self.coeffs), self.order, self.center
        )

    def __sub__(self, other) -> "LaurentSeries":
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        c = self.field.convert(c) if isinstance(c, int) else c
        if not c:
            return LaurentSeries.zero(self.field, self.order, self.center)
        return LaurentSeries(
            self.field, self.valuation, tuple(c * a for a in self.coeffs), self.order, self.center
        )

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by s^k."""
        return LaurentSeries(
            self.field, self.valuation + k, self.coeffs, self.order + k, self.center
        )

    def mul(self, other: "LaurentSeries", through: int = None) -> "LaurentSeries":
        """Product, optionally computed only through s^through."""
        order = min(self.order + other.valuation, other.order + self.valuation)
        if through is not None:
            order = min(order, through)
        if self.is_zero or other.is_zero:
            return LaurentSeries.zero(self.field, order, self.center)
        low = self.valuation + other.valuation
        n = min(order - low + 1, len(self.coeffs) + len(other.coeffs) - 1)
        if n <= 0:
            return LaurentSeries.zero(self.field, order, self.center)
        out = [self.field.zero] * n
        B = other.coeffs
        for i, a in enumerate(self.coeffs[:n]):
            if not a:
                continue
            for j, b in enumerate(B[: n - i]):
                if b:
                    out[i + j] += a * b
        return LaurentSeries.make(self.field, low, out, order, self.center)

    def __mul__(self, other) -> "LaurentSeries":
        if self._is_series(other):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        if self.is_zero:
            raise QuantumCurveError("cannot invert a series with no known nonzero coefficient")
        v = self.valuation
        order = self.order - 2 * v
        n = self.order - v + 1
        A = self.coeffs
        inv0 = self.field.one / A[0]
        out = [inv0]
        for k in range(1, n):
            acc = self.field.zero
            for i in range(1, min(k, len(A) - 1) + 1):
                acc += A[i] * out[k - i]
            out.append(-acc * inv0)
        return LaurentSeries.make(self.field, -v, out, order, self.center)

    def __truediv__(self, other) -> "LaurentSeries":
        if self._is_series(other):
            return self.mul(other.inverse())
        c = self.field.convert(other) if isinstance(other, int) else other
        return self.scale(self.field.one / c)

    def __rtruediv__(self, other) -> "LaurentSeries":
        return self.inverse().scale(self.field.convert(other) if isinstance(other, int) else other)

    def pow(self, n: int, through: int = None) -> "LaurentSeries":
        if n < 0:
            return self.inverse().pow(-n, through)
        result = LaurentSeries.one(self.field, self.order - self.valuation, self.center)
        base = self
        while n:
            if n & 1:
                result = result.mul(base, through)
            n >>= 1
            if n:
                base = base.mul(base, through)
        return result

    def __pow__(self, n: int) -> "LaurentSeries":
        return self.pow(n)

    # calculus ---------------------------------------------------------

    def derivative(self) -> "LaurentSeries":
        coeffs = [(self.valuation + i) * c for i, c in enumerate(self.coeffs)]
        return LaurentSeries.make(
            self.field, self.valuation - 1, coeffs, self.order - 1, self.center
        )

    def integral(self) -> "LaurentSeries":
        """Antiderivative with zero constant term."""
        if self.order >= -1 and self._get(-1):
            raise QuantumCurveError("series has a nonzero s^-1 term and no Laurent antiderivative")
        one = self.field.one
        coeffs = [
            c * (one / self.field.convert(self.valuation + i + 1)) if self.valuation + i != -1 else c
            for i, c in enumerate(self.coeffs)
        ]
        return LaurentSeries.make(
            self.field, self.valuation + 1, coeffs, self.order + 1, self.center
        )

    def compose(self, inner: "LaurentSeries") -> "LaurentSeries":
        """self(inner(s)) for inner of positive valuation."""
        if inner.is_zero or inner.valuation < 1:
            raise QuantumCurveError("can only substitute a series of positive valuation")
        w = inner.valuation
        target = (self.order + 1) * w - 1
        if self.is_zero:
            return LaurentSeries.zero(self.field, target, inner.center)
        v = self.valuation
        power = inner.pow(v, target)
        acc = LaurentSeries.zero(self.field, target, inner.center)
        for k in range(v, self.order + 1):
            a = self._get(k)
            if a:
                acc = acc + power.scale(a)
            if k < self.order:
                power = power.mul(inner, target)
        return acc.truncate(target)

    def exp(self) -> "LaurentSeries":
        """exp of a series with zero constant term."""
        if self.is_zero:
            return LaurentSeries.one(self.field, self.order, self.center)
        if self.valuation < 1:
            raise QuantumCurveError("exp needs a series with positive valuation")
        acc = LaurentSeries.one(self.field, self.order, self.center)
        term = acc
        k = 1
        while k * self.valuation <= self.order:
            term = term.mul(self, self.order).scale(self.field.one / self.field.convert(k))
            acc = acc + term
            k += 1
        return acc

    def log(self) -> "LaurentSeries":
        return series_log(self)

    def revert(self) -> "LaurentSeries":
        """Compositional inverse of a series s ↦ c₁s + c₂s² + ... with c₁ ≠ 0."""
        if self.valuation != 1:
            raise QuantumCurveError("reversion needs a series of valuation exactly 1")
        N = self.order
        c1 = self.coeffs[0]
        inv_c1 = self.field.one / c1
        s = LaurentSeries.monomial(self.field, 1, N, center=self.center)
        higher = self - s.scale(c1)
        w = s.scale(inv_c1)
        if higher.is_zero:
            return w
        for _ in range(N):
            w = (s - higher.compose(w)).scale(inv_c1).truncate(N)
        return w

    def format(self, variable: str = "s") -> str:
        terms = []
        for k, c in self.items():
            coeff = self.field.format(c)
            if " " in coeff or "/" in coeff:
                coeff = f"({coeff})"
            if k == 0:
                terms.append(coeff)
            else:
                power = variable if k == 1 else f"{variable}^{k}"
                terms.append(power if coeff == "1" else f"{coeff}*{power}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O({variable}^{self.order + 1})"


def series_log(u: LaurentSeries) -> LaurentSeries:
    """
    log of a series with constant term 1, via the integral of u'/u.

    Example:
        1 + s known through s^3 gives s - s^2/2 + s^3/3.
    """
    if u.is_zero or u.valuation != 0 or u.coeffs[0] != u.field.one:
        raise QuantumCurveError("series_log needs lowest order 0 and constant term 1")
    if len(u.coeffs) == 1:
        return LaurentSeries.zero(u.field, u.order, u.center)
    return u.derivative().mul(u.inverse()).integral()


def series_expand(f: RationalFunction, center, order: int) -> LaurentSeries:
    """
    Laurent expansion of a rational function through s^order.

    At a finite center s = z - center; at INFINITY the coordinate is s = 1/z.
    """
    field = f.field
    if f.is_zero:
        return LaurentSeries.zero(field, order, center)
    if center is INFINITY:
        numer = list(reversed(f.coefficients("numer")))
        denom = list(reversed(f.coefficients("denom")))
        offset = f.denom_degree() - f.numer_degree()
    else:
        g = f.shift(field.convert(center) if isinstance(center, int) else center)
        numer = g.coefficients("numer")
        denom = g.coefficients("denom")
        offset = 0
    vn = next(i for i, c in enumerate(numer) if c)
    vd = next(i for i, c in enumerate(denom) if c)
    A, D = numer[vn:], denom[vd:]
    valuation = vn - vd + offset
    n = order - valuation + 1
    if n <= 0:
        return LaurentSeries.zero(field, order, center)
    inv0 = field.one / D[0]
    out: List[FieldElement] = []
    for k in range(n):
        acc = A[k] if k < len(A) else field.zero
        for i in range(1, min(k, len(D) - 1) + 1):
            acc -= D[i] * out[k - i]
        out.append(acc * inv0)
    return LaurentSeries.make(field, valuation, out, order, center)


def principal_parts(
    f: RationalFunction, points: Sequence[FieldElement]
) -> Tuple[Dict[Tuple[int, int], FieldElement], RationalFunction]:
    """
    Partial fractions of f over the given finite poles.

    Returns:
        ({(point index, m): c} for the terms c·(z - point)^(-m-1), polynomial part)

    Raises:
        QuantumCurveError if f has a pole away from the given points
    """
    field, symbol = f.field, f.symbol
    z = RationalFunction.variable(field, symbol)
    parts: Dict[Tuple[int, int], FieldElement] = {}
    remainder = f
    for index, point in enumerate(points):
        local = series_expand(f, point, -1)
        for k, c in local.principal_part().items():
            parts[(index, -k - 1)] = c
            remainder = remainder - (z - point) ** k * c
    if not remainder.is_polynomial:
        raise QuantumCurveError(
            f"{f.format()} has poles outside {[field.format(p) for p in points]}"
        )
    return parts, remainder
