"""
Log-augmented functions

Values of the form R(z) + Σ cᵢ(z)·log pᵢ(z) + Σ dⱼ(z)·log vⱼ, where the pᵢ
are monic irreducible polynomials and the vⱼ are field constants ≠ 1. Every
log argument is factored on construction, so the representation is
canonical and closed under d/dz. Antiderivatives use Hermite reduction and
succeed whenever the logarithmic part splits over the working field.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import sympy

from .errors import CurveError, QuantumCurveError
from .field import Field, FieldElement
from .rational import RationalFunction
from .series import INFINITY, LaurentSeries, series_expand, series_log

logger = logging.getLogger(__name__)

LogTerm = Tuple[RationalFunction, RationalFunction]
ConstantTerm = Tuple[FieldElement, RationalFunction]


@dataclass(frozen=True)
class LocalExpansion:
    """
    Expansion of a log-augmented function at a point.

    The function equals `series + Σ log(value)·coefficient` near the point;
    the log constants are kept symbolic.
    """

    series: LaurentSeries
    log_constants: Tuple[Tuple[FieldElement, LaurentSeries], ...] = ()

    def constant_free(self, what: str = "function") -> LaurentSeries:
        for value, coefficient in self.log_constants:
            if not coefficient.is_zero:
                field = self.series.field
                raise CurveError(
                    f"{what} carries an uncancelled constant log({field.format(value)})"
                )
        return self.series


class LogAugmentedFunction:
    """Rational part plus logarithms, in canonical factored form."""

    __slots__ = ("rational", "logs", "constants", "_hash")

    def __init__(
        self,
        rational: RationalFunction,
        logs: Iterable[LogTerm] = (),
        constants: Iterable[ConstantTerm] = (),
    ):
        field, symbol = rational.field, rational.symbol
        merged: Dict[RationalFunction, RationalFunction] = {}
        merged_constants: Dict[FieldElement, RationalFunction] = {}

        def add_constant(value, coefficient):
            if value == field.one or coefficient.is_zero:
                return
            previous = merged_constants.get(value)
            merged_constants[value] = coefficient if previous is None else previous + coefficient

        for coefficient, argument in logs:
            if coefficient.is_zero:
                continue
            if argument.is_zero:
                raise QuantumCurveError("log of zero")
            if argument.is_constant:
                add_constant(argument.constant_value(), coefficient)
                continue
            if argument.is_polynomial and argument.numer_degree() == 1 and argument.numer.LC == field.one:
                factors = [(argument, 1)]
                lc = field.one
            else:
                lc, factors = argument.factor()
            add_constant(lc, coefficient)
            for poly, e in factors:
                previous = merged.get(poly)
                term = coefficient * e
                merged[poly] = term if previous is None else previous + term
        for value, coefficient in constants:
            add_constant(value, coefficient)

        self.rational = rational
        self.logs: Tuple[LogTerm, ...] = tuple(
            sorted(
                ((c, p) for p, c in merged.items() if not c.is_zero),
                key=lambda t: t[1].format(),
            )
        )
        self.constants: Tuple[ConstantTerm, ...] = tuple(
            sorted(
                ((v, c) for v, c in merged_constants.items() if not c.is_zero),
                key=lambda t: field.format(t[0]),
            )
        )
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def from_rational(cls, f: RationalFunction) -> "LogAugmentedFunction":
        return cls(f)

    @classmethod
    def log_of(
        cls, argument: RationalFunction, coefficient=None
    ) -> "LogAugmentedFunction":
        if argument.is_constant:
            raise QuantumCurveError("log of a constant")
        one = RationalFunction.constant(argument.field, 1, argument.symbol)
        c = one if coefficient is None else one * coefficient
        return cls(one * 0, [(c, argument)])

    @classmethod
    def zero(cls, field: Field, symbol: str = "z") -> "LogAugmentedFunction":
        return cls(RationalFunction.constant(field, 0, symbol))

    @property
    def field(self) -> Field:
        return self.rational.field

    @property
    def symbol(self) -> str:
        return self.rational.symbol

    @property
    def is_rational(self) -> bool:
        return not self.logs and not self.constants

    @property
    def is_zero(self) -> bool:
        return self.is_rational and self.rational.is_zero

    def as_rational(self) -> RationalFunction:
        if not self.is_rational:
            raise QuantumCurveError(f"{self.format()} is not a rational function")
        return self.rational

    # arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "LogAugmentedFunction":
        if isinstance(other, LogAugmentedFunction):
            return other
        if isinstance(other, RationalFunction):
            return LogAugmentedFunction(other)
        return LogAugmentedFunction(RationalFunction.constant(self.field, other, self.symbol))

    def __add__(self, other) -> "LogAugmentedFunction":
        other = self._coerce(other)
        return LogAugmentedFunction(
            self.rational + other.rational,
            self.logs + other.logs,
            self.constants + other.constants,
        )

    __radd__ = __add__

    def __neg__(self) -> "LogAugmentedFunction":
        return LogAugmentedFunction(
            -self.rational,
            [(-c, p) for c, p in self.logs],
            [(v, -c) for v, c in self.constants],
        )

    def __sub__(self, other) -> "LogAugmentedFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LogAugmentedFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LogAugmentedFunction":
        other = self._coerce(other)
        if not other.is_rational:
            if not self.is_rational:
                raise QuantumCurveError("product of two logarithmic functions is not supported")
            return other * self
        f = other.rational
        return LogAugmentedFunction(
            self.rational * f,
            [(c * f, p) for c, p in self.logs],
            [(v, c * f) for v, c in self.constants],
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogAugmentedFunction":
        other = self._coerce(other)
        if not other.is_rational:
            raise QuantumCurveError("division by a logarithmic function is not supported")
        return self * (RationalFunction.constant(self.field, 1, self.symbol) / other.rational)

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except (QuantumCurveError, TypeError):
            return NotImplemented
        return (
            self.rational == other.rational
            and self.logs == other.logs
            and self.constants == other.constants
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rational, self.logs, self.constants))
        return self._hash

    def __repr__(self) -> str:
        return f"LogAugmentedFunction({self.format()})"

    def __str__(self) -> str:
        return self.format()

    # calculus ---------------------------------------------------------

    def diff(self) -> "LogAugmentedFunction":
        """d/dz."""
        rational = self.rational.diff()
        logs = []
        for c, p in self.logs:
            rational = rational + c * p.diff() / p
            logs.append((c.diff(), p))
        constants = [(v, c.diff()) for v, c in self.constants]
        return LogAugmentedFunction(rational, logs, constants)

    def diff_x(self, x_prime: RationalFunction) -> "LogAugmentedFunction":
        """d/dx = (1/x'(z)) d/dz."""
        return self.diff() / x_prime

    def integrate(self) -> "LogAugmentedFunction":
        """Antiderivative in z; constants of integration are zero."""
        result = integrate_rational(self.rational)
        for c, p in self.logs:
            outer = integrate_rational(c)
            if not outer.is_rational:
                raise CurveError(f"antiderivative of ({c.format()})*log({p.format()}) needs log^2")
            C = outer.rational
            result = result + LogAugmentedFunction(C * 0, [(C, p)])
            result = result - integrate_rational(C * p.diff() / p)
        for v, c in self.constants:
            outer = integrate_rational(c)
            if not outer.is_rational:
                raise CurveError("antiderivative needs a product of logarithms")
            result = result + LogAugmentedFunction(c * 0, [], [(v, outer.rational)])
        return result

    def compose(self, inner: RationalFunction) -> "LogAugmentedFunction":
        """self(inner(z))."""
        return LogAugmentedFunction(
            self.rational.compose(inner),
            [(c.compose(inner), p.compose(inner)) for c, p in self.logs],
            [(v, c.compose(inner)) for v, c in self.constants],
        )

    def exp_rational(self) -> RationalFunction:
        """exp(self) when it is a product of integer powers."""
        if not self.rational.is_zero:
            raise QuantumCurveError(f"exp({self.format()}) is not rational")
        field = self.field
        result = RationalFunction.constant(field, 1, self.symbol)
        for c, p in self.logs:
            result = result * p ** _integer(c, self)
        for v, c in self.constants:
            e = _integer(c, self)
            value = v**e if e >= 0 else (field.one / v) ** (-e)
            result = result * value
        return result

    # expansions -------------------------------------------------------

    def series_at(self, center: FieldElement, order: int) -> LocalExpansion:
        """
        Expansion at a finite point where every log argument is nonzero.

        Raises:
            CurveError: a log argument vanishes at the point
        """
        field = self.field
        result = series_expand(self.rational, center, order)
        constants: Dict[FieldElement, LaurentSeries] = {}
        for c, p in self.logs:
            value = p.evaluate(center)
            if not value:
                raise CurveError(
                    f"log({p.format()}) is singular at {field.format(center)}"
                )
            c_series = series_expand(c, center, order)
            margin = max(0, -c_series.valuation) if not c_series.is_zero else 0
            local = series_expand(p, center, order + margin).scale(field.one / value)
            result = result + c_series.mul(series_log(local)).truncate(order)
            if value != field.one:
                _accumulate(constants, value, c_series)
        for v, c in self.constants:
            _accumulate(constants, v, series_expand(c, center, order))
        return LocalExpansion(
            result,
            tuple((v, s) for v, s in constants.items() if not s.is_zero),
        )

    def series_at_infinity(self, order: int) -> Tuple[FieldElement, LocalExpansion]:
        """
        Expansion in w = 1/z at z = ∞.

        Returns:
            (coefficient of log z, expansion of the remainder in w)
        """
        field = self.field
        result = series_expand(self.rational, INFINITY, order)
        log_z = field.zero
        constants: Dict[FieldElement, LaurentSeries] = {}
        for c, p in self.logs:
            if not c.is_constant:
                raise CurveError(f"log coefficient {c.format()} is not constant at infinity")
            k = c.constant_value()
            log_z += k * field.convert(p.numer_degree())
            # p monic: p(1/w) = w^-deg·(1 + ...)
            local = series_expand(p, INFINITY, order + p.numer_degree()).shift(p.numer_degree())
            result = result + series_log(local).scale(k)
        for v, c in self.constants:
            _accumulate(constants, v, series_expand(c, INFINITY, order))
        return log_z, LocalExpansion(
            result, tuple((v, s) for v, s in constants.items() if not s.is_zero)
        )

    # printing ---------------------------------------------------------

    def to_sympy(self, symbol=None) -> sympy.Expr:
        sym = symbol if symbol is not None else sympy.Symbol(self.symbol)
        expr = self.rational.to_sympy(sym)
        for c, p in self.logs:
            expr += c.to_sympy(sym) * sympy.log(p.to_sympy(sym))
        for v, c in self.constants:
            expr += c.to_sympy(sym) * sympy.log(self.field.to_sympy(v))
        return expr

    def format(self) -> str:
        """Print in the expression grammar; parse_expr reads it back to the same value."""
        pieces: List[str] = []
        if not self.rational.is_zero or (not self.logs and not self.constants):
            pieces.append(self.rational.format())
        pending = list(self.constants)
        for c, p in self.logs:
            argument = p
            for i, (v, cv) in enumerate(pending):
                if cv == c:
                    argument = p * v
                    pending.pop(i)
                    break
            pieces.append(_log_piece(c, argument))
        z = RationalFunction.variable(self.field, self.symbol)
        for v, c in pending:
            pieces.append(_log_piece(c, z * v))
            pieces.append(_log_piece(-c, z))
        text = pieces[0]
        for piece in pieces[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text


def _log_piece(c: RationalFunction, argument: RationalFunction) -> str:
    body = f"log({argument.format()})"
    if c.is_constant:
        k = c.format()
        if k == "1":
            return body
        if k == "-1":
            return f"-{body}"
        if " " in k:
            k = f"({k})"
        return f"{k}*{body}"
    return f"({c.format()})*{body}"


def _accumulate(table: Dict[FieldElement, LaurentSeries], key, series: LaurentSeries) -> None:
    table[key] = series if key not in table else table[key] + series


def _integer(c: RationalFunction, owner: LogAugmentedFunction) -> int:
    if not c.is_constant:
        raise QuantumCurveError(f"exp({owner.format()}) is not rational")
    q = owner.field.to_rational(c.constant_value())
    if q.denominator != 1:
        raise QuantumCurveError(f"exp({owner.format()}) has a fractional power")
    return int(q.numerator)


def integrate_rational(f: RationalFunction) -> LogAugmentedFunction:
    """
    ∫ f dz by Hermite reduction on each irreducible factor of the denominator.

    Raises:
        CurveError: the logarithmic part needs roots outside the working field
    """
    field, symbol = f.field, f.symbol
    R, gen = field.ring(symbol)

    def rf(numer, denom=None) -> RationalFunction:
        return RationalFunction(field, symbol, numer, denom)

    if f.is_zero:
        return LogAugmentedFunction(f)
    quotient, A = f.numer.div(f.denom)
    rational = rf(_integrate_polynomial(field, R, quotient))
    logs: List[LogTerm] = []
    if A:
        D = f.denom
        _, factors = D.factor_list()
        for p, e in factors:
            p = p.monic()
            P = p**e
            Q = D.exquo(P)
            # s·Q + t·P = 1, so A/D = (A·s mod P)/P + (rest)/Q
            s, t, h = Q.gcdex(P)
            if h != R.one:
                raise QuantumCurveError("denominator factors are not coprime")
            k, A_p = (A * s).div(P)
            A = A * t + k * Q
            D = Q
            A = A.div(D)[1] if D != R.one else R.zero
            rational, log_part = _integrate_prime_power(field, symbol, A_p, p, e, rational)
            logs.extend(log_part)
    return LogAugmentedFunction(rational, logs)


def _integrate_polynomial(field: Field, R, poly):
    terms = {}
    for (k,), c in poly.terms():
        terms[(k + 1,)] = c * (field.one / field.convert(k + 1))
    return R.from_dict(terms) if terms else R.zero


def _integrate_prime_power(field: Field, symbol: str, A, p, e: int, rational: RationalFunction):
    """∫ A/p^e with p monic irreducible and deg A < e·deg p."""
    R, gen = field.ring(symbol)
    dp = p.diff(gen)
    numerators: Dict[int, object] = {e: A}
    logs: List[LogTerm] = []
    s, t, h = p.gcdex(dp)
    for m in range(e, 0, -1):
        N = numerators.get(m, R.zero)
        if not N:
            continue
        q, r = N.div(p)
        if q:
            if m - 1 == 0:
                rational = rational + RationalFunction(
                    field, symbol, _integrate_polynomial(field, R, q)
                )
            else:
                numerators[m - 1] = numerators.get(m - 1, R.zero) + q
        if not r:
            continue
        if m >= 2:
            inv = field.one / field.convert(m - 1)
            rt = r * t
            rational = rational - RationalFunction(field, symbol, rt * inv, p ** (m - 1))
            numerators[m - 1] = numerators.get(m - 1, R.zero) + r * s + rt.diff(gen) * inv
            continue
        # m == 1: the remainder must be a constant multiple of p'
        c = r.LC * (field.one / dp.LC)
        if r != dp * c:
            raise CurveError(
                f"antiderivative needs the roots of {RationalFunction(field, symbol, p).format()}"
            )
        constant = RationalFunction.constant(field, c, symbol)
        logs.append((constant, RationalFunction(field, symbol, p)))
    return rational, logs


def log_augmented(value: Optional[object], field: Field, symbol: str = "z") -> LogAugmentedFunction:
    """Coerce a rational function, scalar or log-augmented value."""
    if isinstance(value, LogAugmentedFunction):
        return value
    if isinstance(value, RationalFunction):
        return LogAugmentedFunction(value)
    return LogAugmentedFunction(RationalFunction.constant(field, value or 0, symbol))
