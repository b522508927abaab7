"""
Univariate rational functions

Exact rational functions in the curve parameter, stored as a pair of sparse
sympy polynomials with gcd 1 and a monic denominator, so that structural
equality is mathematical equality.
"""

from typing import Dict, List, Sequence, Tuple

import sympy

from .errors import QuantumCurveError
from .field import Field, FieldElement


class RationalFunction:
    """
    numerator / denominator over a Field, in one named parameter.

    Instances are immutable; every operation returns a new normalised value.
    """

    __slots__ = ("field", "symbol", "numer", "denom", "_hash")

    def __init__(self, field: Field, symbol: str, numer, denom=None):
        R, _ = field.ring(symbol)
        numer = R(numer)
        denom = R.one if denom is None else R(denom)
        if not denom:
            raise QuantumCurveError("division by the zero polynomial")
        if not numer:
            denom = R.one
        else:
            common = numer.gcd(denom)
            if common != R.one:
                numer = numer.exquo(common)
                denom = denom.exquo(common)
            lc = denom.LC
            if lc != field.one:
                numer = numer.quo_ground(lc)
                denom = denom.quo_ground(lc)
        self.field = field
        self.symbol = symbol
        self.numer = numer
        self.denom = denom
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def constant(cls, field: Field, value, symbol: str = "z") -> "RationalFunction":
        R, _ = field.ring(symbol)
        return cls(field, symbol, R(field.convert(value)))

    @classmethod
    def variable(cls, field: Field, symbol: str = "z") -> "RationalFunction":
        _, gen = field.ring(symbol)
        return cls(field, symbol, gen)

    @classmethod
    def from_coefficients(
        cls, field: Field, coeffs: Sequence, symbol: str = "z"
    ) -> "RationalFunction":
        """Polynomial Σ coeffs[i]·z^i."""
        R, _ = field.ring(symbol)
        terms = {(i,): field.convert(c) for i, c in enumerate(coeffs) if c}
        return cls(field, symbol, R.from_dict(terms) if terms else R.zero)

    @classmethod
    def from_sympy(cls, expr: sympy.Expr, field: Field, symbol: str = "z") -> "RationalFunction":
        expr = sympy.cancel(sympy.sympify(expr))
        numer, denom = sympy.fraction(expr)
        R, _ = field.ring(symbol)
        sym = sympy.Symbol(symbol)
        try:
            p = sympy.Poly(numer, sym, domain=field.domain)
            q = sympy.Poly(denom, sym, domain=field.domain)
        except sympy.PolynomialError as exc:
            raise QuantumCurveError(f"not a rational function of {symbol}: {expr}") from exc
        return cls(
            field,
            symbol,
            R.from_dict(p.as_dict(native=True)),
            R.from_dict(q.as_dict(native=True)),
        )

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.symbol != self.symbol or other.field != self.field:
                raise QuantumCurveError(
                    f"cannot combine functions of {self.symbol} over {self.field!r} "
                    f"and {other.symbol} over {other.field!r}"
                )
            return other
        return RationalFunction.constant(self.field, other, self.symbol)

    # arithmetic -------------------------------------------------------

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if self.denom == other.denom:
            return RationalFunction(self.field, self.symbol, self.numer + other.numer, self.denom)
        return RationalFunction(
            self.field,
            self.symbol,
            self.numer * other.denom + other.numer * self.denom,
            self.denom * other.denom,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(self.field, self.symbol, -self.numer, self.denom)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(
            self.field, self.symbol, self.numer * other.numer, self.denom * other.denom
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if other.is_zero:
            raise QuantumCurveError("division by the zero polynomial")
        return RationalFunction(
            self.field, self.symbol, self.numer * other.denom, self.denom * other.numer
        )

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "RationalFunction":
        if not isinstance(n, int):
            raise QuantumCurveError(f"only integer powers are supported, got {n!r}")
        if n == 0:
            return RationalFunction.constant(self.field, 1, self.symbol)
        if n < 0:
            if self.is_zero:
                raise QuantumCurveError("division by the zero polynomial")
            return RationalFunction(self.field, self.symbol, self.denom**-n, self.numer**-n)
        if self.is_zero:
            return self
        return RationalFunction(self.field, self.symbol, self.numer**n, self.denom**n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = self._coerce(other)
            except (QuantumCurveError, TypeError):
                return NotImplemented
        return (
            self.symbol == other.symbol
            and self.field == other.field
            and self.numer == other.numer
            and self.denom == other.denom
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.symbol, self.field, self.numer, self.denom))
        return self._hash

    def __repr__(self) -> str:
        return f"RationalFunction({self.format()})"

    # queries ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.numer

    @property
    def is_constant(self) -> bool:
        return self.numer.is_ground and self.denom.is_ground

    @property
    def is_polynomial(self) -> bool:
        return self.denom.is_ground

    def constant_value(self) -> FieldElement:
        if not self.is_constant:
            raise QuantumCurveError(f"{self.format()} is not constant")
        return self.numer.LC if self.numer else self.field.zero

    def numer_degree(self) -> int:
        return self.numer.degree() if self.numer else -1

    def denom_degree(self) -> int:
        return self.denom.degree()

    def coefficients(self, which: str = "numer") -> List[FieldElement]:
        """Dense coefficient list, lowest degree first."""
        poly = self.numer if which == "numer" else self.denom
        if not poly:
            return []
        out = [self.field.zero] * (poly.degree() + 1)
        for (k,), c in poly.terms():
            out[k] = c
        return out

    def evaluate(self, point: FieldElement) -> FieldElement:
        point = self.field.convert(point) if isinstance(point, int) else point
        d = self.denom.evaluate(self.denom.ring.gens[0], point)
        if not d:
            raise QuantumCurveError(
                f"{self.format()} has a pole at {self.field.format(point)}"
            )
        n = self.numer.evaluate(self.numer.ring.gens[0], point) if self.numer else self.field.zero
        return n * (self.field.one / d)

    def diff(self) -> "RationalFunction":
        gen = self.numer.ring.gens[0]
        return RationalFunction(
            self.field,
            self.symbol,
            self.numer.diff(gen) * self.denom - self.numer * self.denom.diff(gen),
            self.denom**2,
        )

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """self(inner(z))."""
        inner = self._coerce(inner)

        def horner(coeffs: List[FieldElement]) -> RationalFunction:
            acc = RationalFunction.constant(self.field, 0, self.symbol)
            for c in reversed(coeffs):
                acc = acc * inner + c
            return acc

        return horner(self.coefficients("numer")) / horner(self.coefficients("denom"))

    def shift(self, a: FieldElement) -> "RationalFunction":
        """z ↦ z + a."""
        _, gen = self.field.ring(self.symbol)
        return RationalFunction(
            self.field,
            self.symbol,
            self.numer.compose(gen, gen + a) if self.numer else self.numer,
            self.denom.compose(gen, gen + a),
        )

    def factor(self) -> Tuple[FieldElement, List[Tuple["RationalFunction", int]]]:
        """
        Factor into lc · Π p_i^{e_i} with p_i monic irreducible.

        Denominator factors come back with negative exponents.
        """
        if self.is_zero:
            raise QuantumCurveError("cannot factor the zero function")
        lc, numer_factors = self.numer.factor_list()
        _, denom_factors = self.denom.factor_list()
        out: Dict[RationalFunction, int] = {}
        for poly, e in numer_factors:
            lead = poly.LC
            lc = lc * lead**e
            key = RationalFunction(self.field, self.symbol, poly.quo_ground(lead))
            out[key] = out.get(key, 0) + e
        for poly, e in denom_factors:
            lead = poly.LC
            lc = lc * (self.field.one / lead) ** e
            key = RationalFunction(self.field, self.symbol, poly.quo_ground(lead))
            out[key] = out.get(key, 0) - e
        factors = sorted(((p, e) for p, e in out.items() if e), key=lambda t: t[0].format())
        return lc, factors

    def linear_root(self) -> FieldElement:
        """Root of a monic linear polynomial."""
        if not self.is_polynomial or self.numer_degree() != 1:
            raise QuantumCurveError(f"{self.format()} is not linear")
        c = self.coefficients()
        return -c[0] * (self.field.one / c[1])

    # printing ---------------------------------------------------------

    def to_sympy(self, symbol=None) -> sympy.Expr:
        sym = symbol if symbol is not None else sympy.Symbol(self.symbol)
        to = self.field.to_sympy
        numer = sum((to(c) * sym**k for (k,), c in self.numer.terms()), sympy.Integer(0))
        denom = sum((to(c) * sym**k for (k,), c in self.denom.terms()), sympy.Integer(0))
        return numer / denom

    def format(self) -> str:
        """Print in the expression grammar accepted by `parser.parse_expr`."""
        numer = format_polynomial(self.field, self.symbol, self.numer)
        if self.denom.is_ground:
            return numer
        denom = format_polynomial(self.field, self.symbol, self.denom)
        if len(self.numer) > 1 or numer.startswith("-") or "*" in numer or "/" in numer:
            numer = f"({numer})"
        if len(self.denom) > 1 or "*" in denom or "^" in denom:
            denom = f"({denom})"
        return f"{numer}/{denom}"

    def __str__(self) -> str:
        return self.format()


def format_polynomial(field: Field, symbol: str, poly) -> str:
    if not poly:
        return "0"
    pieces = []
    for (k,), c in sorted(poly.terms(), key=lambda t: -t[0][0]):
        coeff = field.format(c)
        if " " in coeff:
            coeff = f"({coeff})"
        if k == 0:
            monomial = ""
        elif k == 1:
            monomial = symbol
        else:
            monomial = f"{symbol}^{k}"
        if not monomial:
            pieces.append(coeff)
        elif coeff == "1":
            pieces.append(monomial)
        elif coeff == "-1":
            pieces.append(f"-{monomial}")
        else:
            pieces.append(f"{coeff}*{monomial}")
    text = pieces[0]
    for piece in pieces[1:]:
        text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return text
