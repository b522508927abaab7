"""
Wave function assembly

ψ = exp(Σ_k ħ^{k−1} S_k) with S_0 = ∫ y dx, S_1 = −½ log(dx/dz) and, for
k ≥ 2, S_k = Σ_{2g−1+n=k} F^g_n(z, …, z)/n! where F^g_n is the principal-part
primitive of ω^g_n in the quantum normalisation.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.polys.rings import ring as poly_ring
from sympy.utilities.iterables import multiset_permutations

from .curve import BranchData, SpectralCurve, validate_curve
from .errors import CurveError, GuardError, QuantumCurveError
from .expansion import inverse_coordinate, log_parameter
from .field import Field, FieldElement
from .logfunc import LogAugmentedFunction
from .rational import RationalFunction
from .recursion import Key, Multidifferential, PoleBasisIndex, TopologicalRecursion, ordering_count
from .series import LaurentSeries

logger = logging.getLogger(__name__)

PRIMITIVES = ("principal", "basepoint")


@dataclass(frozen=True)
class PrimitiveFunction:
    """
    F^g_n with d₁⋯d_n F = ω^g_n, stored slotwise.

    Each basis differential (z − α)^{−k−1}dz becomes −(1/k)(z − α)^{−k}; with
    a basepoint b the value at b is subtracted in every slot.
    """

    g: int
    n: int
    field: Field
    alphas: Tuple[FieldElement, ...]
    coefficients: Mapping[Key, FieldElement]
    symbol: str = "z"
    basepoint: Optional[FieldElement] = None

    def slot(self, v: PoleBasisIndex) -> RationalFunction:
        alpha = self.alphas[v.branch]
        z = RationalFunction.variable(self.field, self.symbol)
        scale = -(self.field.one / self.field.convert(v.k))
        value = (z - alpha) ** (-v.k) * scale
        if self.basepoint is not None:
            value = value - (self.basepoint - alpha) ** (-v.k) * scale
        return value

    def diagonal(self) -> RationalFunction:
        """F^g_n(z, …, z)."""
        cache: Dict[PoleBasisIndex, RationalFunction] = {}
        total = RationalFunction.constant(self.field, 0, self.symbol)
        for key, c in sorted(self.coefficients.items()):
            weight = c * self.field.convert(ordering_count(key))
            term = RationalFunction.constant(self.field, weight, self.symbol)
            for v in key:
                if v not in cache:
                    cache[v] = self.slot(v)
                term = term * cache[v]
            total = total + term
        return total

    def to_sympy(self, symbols) -> sympy.Expr:
        to = self.field.to_sympy
        cache = {}
        expr = sympy.Integer(0)
        for key, c in self.coefficients.items():
            for ordering in multiset_permutations(list(key)):
                term = to(c)
                for sym, v in zip(symbols, ordering):
                    if (sym, v) not in cache:
                        cache[(sym, v)] = self.slot(v).to_sympy(sym)
                    term *= cache[(sym, v)]
                expr += term
        return expr

    def differentiate(self, symbols) -> sympy.Expr:
        """∂₁⋯∂_n F as an expression; equals the coefficient of dz₁⋯dz_n in ω."""
        expr = self.to_sympy(symbols)
        for sym in symbols:
            expr = sympy.diff(expr, sym)
        return sympy.cancel(expr)


def _check_primitive_input(omega: Multidifferential) -> None:
    if not omega.is_stable:
        raise QuantumCurveError(
            f"omega^{omega.g}_{omega.n} is unstable; its primitive is handled in closed form"
        )
    for key, _ in omega.items():
        for v in key:
            if v.k < 1:
                raise QuantumCurveError(
                    f"omega^{omega.g}_{omega.n} carries a residue term {omega.format_key(key)}"
                )


def primitive_principal(omega: Multidifferential) -> PrimitiveFunction:
    """Principal-part primitive: no integration constants."""
    _check_primitive_input(omega)
    return PrimitiveFunction(
        omega.g, omega.n, omega.field, omega.alphas, dict(omega.coefficients), omega.symbol
    )


def primitive_basepoint(omega: Multidifferential, basepoint: FieldElement) -> PrimitiveFunction:
    """Primitive vanishing whenever one argument equals the basepoint."""
    _check_primitive_input(omega)
    if basepoint in omega.alphas:
        raise QuantumCurveError(
            f"basepoint {omega.field.format(basepoint)} is a branch point"
        )
    return PrimitiveFunction(
        omega.g, omega.n, omega.field, omega.alphas, dict(omega.coefficients), omega.symbol, basepoint
    )


def make_primitive(
    omega: Multidifferential, primitive: str = "principal", basepoint: Optional[FieldElement] = None
) -> PrimitiveFunction:
    if primitive not in PRIMITIVES:
        raise QuantumCurveError(f"unknown primitive {primitive!r}; use one of {list(PRIMITIVES)}")
    if primitive == "principal":
        return primitive_principal(omega)
    if basepoint is None:
        raise QuantumCurveError("basepoint primitive needs a basepoint")
    return primitive_basepoint(omega, basepoint)


def quantum_omega(engine: TopologicalRecursion, g: int, n: int) -> Multidifferential:
    """ω^g_n in the quantum normalisation whatever the engine's convention."""
    omega = engine.omega(g, n)
    if engine.sign < 0 and n % 2 and omega.is_stable:
        return omega.scaled(-engine.field.one)
    return omega


def s_coefficient(
    curve: SpectralCurve,
    k: int,
    engine: Optional[TopologicalRecursion] = None,
    primitive: str = "principal",
    basepoint: Optional[FieldElement] = None,
) -> LogAugmentedFunction:
    """
    S_k as a log-augmented function of the curve parameter.

    Example:
        On the Catalan curve S_1 = −½ log(1 − z⁻²).

    Raises:
        GuardError: k < 0
    """
    if k < 0:
        raise GuardError(f"k must be >= 0, got {k}")
    if k == 0:
        return (curve.y * curve.x_prime).integrate()
    if k == 1:
        x_prime = curve.x_prime
        half = -(curve.field.one / curve.field.convert(2))
        if x_prime.is_constant:
            one = RationalFunction.constant(curve.field, half, curve.parameter)
            return LogAugmentedFunction(one * 0, [], [(x_prime.constant_value(), one)])
        return LogAugmentedFunction.log_of(x_prime, half)
    engine = engine or TopologicalRecursion(curve)
    total = RationalFunction.constant(curve.field, 0, curve.parameter)
    for g in range(0, k // 2 + 1):
        n = k + 1 - 2 * g
        if n < 1:
            continue
        F = make_primitive(quantum_omega(engine, g, n), primitive, basepoint)
        total = total + F.diagonal() * (curve.field.one / curve.field.convert(math.factorial(n)))
    logger.info("S_%d assembled on %s", k, curve.name)
    return LogAugmentedFunction.from_rational(total)


@dataclass(frozen=True)
class WaveExpansion:
    """S_0, …, S_K of one curve with the normalisation they were built under."""

    curve: SpectralCurve
    terms: Tuple[LogAugmentedFunction, ...]
    primitive: str = "principal"
    basepoint: Optional[FieldElement] = None
    t: Optional[FieldElement] = None

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    def __getitem__(self, k: int) -> LogAugmentedFunction:
        return self.terms[k]

    def derivative(self, k: int) -> LogAugmentedFunction:
        """dS_k/dx."""
        return self.terms[k].diff_x(self.curve.x_prime)

    def with_exponent(self, g: RationalFunction, name: Optional[str] = None) -> "WaveExpansion":
        """
        e^{g(x)/ħ}ψ: S_0 gains g(x(z)) and the curve y gains g′(x).

        `g` is a polynomial in x written in the curve parameter's symbol.
        """
        x = self.curve.x
        shift = g.compose(x)
        curve = self.curve.with_y(self.curve.y + g.diff().compose(x), name)
        terms = (self.terms[0] + shift,) + self.terms[1:]
        return WaveExpansion(curve, terms, self.primitive, self.basepoint, self.t)

    def normalisation(self) -> Dict[str, str]:
        field = self.curve.field
        return {
            "primitive": self.primitive,
            "basepoint": "none" if self.basepoint is None else field.format(self.basepoint),
            "S0": "antiderivative of y dx with zero constant",
            "S1": "-1/2 log(dx/dz)",
            "t": "0" if self.t is None else field.format(self.t),
        }

    def rows(self) -> List[Dict[str, str]]:
        return [{"k": str(k), "S_k": s.format()} for k, s in enumerate(self.terms)]


def wave_expansion(
    curve: SpectralCurve,
    order: int,
    engine: Optional[TopologicalRecursion] = None,
    primitive: str = "principal",
    basepoint: Optional[FieldElement] = None,
) -> WaveExpansion:
    """S_0..S_order sharing one recursion engine."""
    if order < 0:
        raise GuardError(f"K must be >= 0, got {order}")
    engine = engine or TopologicalRecursion(curve)
    terms = tuple(s_coefficient(curve, k, engine, primitive, basepoint) for k in range(order + 1))
    return WaveExpansion(curve, terms, primitive, basepoint)


@dataclass(frozen=True)
class ShiftedWave:
    """
    The family e^{tħ d/dx}ψ: S_k(t) = Σ_m t^m/m!·(d/dx)^m S_{k−m}.

    `coefficients[k][m]` is (d/dx)^m S_{k−m}/m!.
    """

    wave: WaveExpansion
    coefficients: Tuple[Tuple[LogAugmentedFunction, ...], ...]

    def at(self, t) -> WaveExpansion:
        curve = self.wave.curve
        t = curve.field.convert(t)
        terms = []
        for row in self.coefficients:
            total = LogAugmentedFunction.zero(curve.field, curve.parameter)
            power = curve.field.one
            for term in row:
                if power:
                    total = total + term * power
                power = power * t
            terms.append(total)
        base = self.wave.t if self.wave.t is not None else curve.field.zero
        return WaveExpansion(curve, tuple(terms), self.wave.primitive, self.wave.basepoint, base + t)


def t_shift(wave: WaveExpansion, order: Optional[int] = None) -> ShiftedWave:
    """Taylor coefficients of the t-family through S_order."""
    order = wave.order if order is None else order
    if order > wave.order:
        raise GuardError(f"wave is known through S_{wave.order}, asked for S_{order}")
    field = wave.curve.field
    x_prime = wave.curve.x_prime
    # derivatives[j][m] = (d/dx)^m S_j
    derivatives: List[List[LogAugmentedFunction]] = []
    for j in range(order + 1):
        column = [wave.terms[j]]
        for _ in range(order - j):
            column.append(column[-1].diff_x(x_prime))
        derivatives.append(column)
    rows = []
    for k in range(order + 1):
        rows.append(
            tuple(
                derivatives[k - m][m] * (field.one / field.convert(math.factorial(m)))
                for m in range(k + 1)
            )
        )
    return ShiftedWave(wave, tuple(rows))


def loop_functional(
    curve: SpectralCurve, f: LogAugmentedFunction, data: Optional[BranchData] = None
) -> FieldElement:
    """
    Σ over branch points of Res dy·f.

    Raises:
        CurveError: f has a log singularity at a branch point, or the
            residue picks up a constant log
    """
    data = data or validate_curve(curve)
    field = curve.field
    dy = curve.y.diff()
    total = field.zero
    for point in data.points:
        local = f.series_at(point.alpha, 0)
        pole = max(0, -local.series.valuation) if not local.series.is_zero else 0
        if pole == 0:
            continue
        dy_local = dy.series_at(point.alpha, pole - 1).constant_free("dy")

        def residue(series: LaurentSeries) -> FieldElement:
            return field.sum(
                series.coefficient(b) * dy_local.coefficient(-1 - b) for b in range(-pole, 0)
            )

        total += residue(local.series)
        for value, coefficient in local.log_constants:
            if residue(coefficient):
                raise CurveError(
                    f"loop functional at {point.label} picks up log({field.format(value)})"
                )
    return total


def regularised_s1(curve: SpectralCurve) -> LogAugmentedFunction:
    """
    −½ times the diagonal of ∫∫(B − dx₁dx₂/(x₁ − x₂)²) = log((x₁ − x₂)/(z₁ − z₂)).

    Agrees with s_coefficient(curve, 1) up to an additive constant.
    """
    z1, z2 = sympy.symbols("z1 z2")
    z = sympy.Symbol(curve.parameter)
    X1, X2 = curve.x.to_sympy(z1), curve.x.to_sympy(z2)
    quotient = sympy.cancel((X1 - X2) / (z1 - z2))
    diagonal = sympy.cancel(quotient.subs(z2, z1).subs(z1, z))
    q = RationalFunction.from_sympy(diagonal, curve.field, curve.parameter)
    half = -(curve.field.one / curve.field.convert(2))
    if q.is_constant:
        one = RationalFunction.constant(curve.field, half, curve.parameter)
        return LogAugmentedFunction(one * 0, [], [(q.constant_value(), one)])
    return LogAugmentedFunction.log_of(q, half)


# expansions at x = ∞ -----------------------------------------------------


@dataclass(frozen=True)
class WaveAtInfinity:
    """S_k = log_x·log x + series(u) + dropped log constants, with u = 1/x."""

    k: int
    log_x: FieldElement
    series: LaurentSeries
    dropped: Tuple[Tuple[FieldElement, LaurentSeries], ...] = ()


def expand_wave_at_infinity(wave: WaveExpansion, depth: int) -> List[WaveAtInfinity]:
    """
    Every S_k of the wave expanded at z = ∞ in u = 1/x through u^depth.

    Raises:
        GuardError: depth < 1
        CurveError: x has no simple pole at z = ∞
    """
    if depth < 1:
        raise GuardError(f"depth must be >= 1, got {depth}")
    field = wave.curve.field
    w = inverse_coordinate(wave.curve, depth + 3)
    leading, correction = log_parameter(w)
    rows = []
    for k, term in enumerate(wave.terms):
        log_z, rest = term.series_at_infinity(depth + 2)
        series = rest.series.compose(w).truncate(depth)
        dropped = [
            (value, coefficient.compose(w).truncate(depth))
            for value, coefficient in rest.log_constants
        ]
        if log_z:
            series = series - correction.scale(log_z).truncate(depth)
            if leading != field.one:
                constant = LaurentSeries.make(field, 0, [-log_z], depth)
                dropped.append((leading, constant))
        rows.append(WaveAtInfinity(k, log_z, series, tuple(dropped)))
    return rows


@dataclass(frozen=True)
class WaveXbarSeries:
    """
    ψ̄ = x^{−L/ħ}ψ as Σ_j u^j·(Laurent polynomial in ħ), L the log x
    coefficient of S_0.

    `coefficients[j]` maps ħ-powers to field elements.
    """

    field: Field
    e_max: int
    log_x: Tuple[FieldElement, ...]
    coefficients: Tuple[Dict[int, FieldElement], ...]
    dropped: Tuple[Tuple[int, FieldElement], ...] = ()

    def laurent(self, e: int) -> Dict[int, FieldElement]:
        """Coefficient of x^{−2e}."""
        if e > self.e_max:
            raise GuardError(f"x^-{2 * e} is beyond e_max = {self.e_max}")
        return self.coefficients[2 * e]

    def rows(self) -> List[Dict[str, str]]:
        out = []
        for j, poly in enumerate(self.coefficients):
            text = " + ".join(f"({self.field.format(c)})*hbar^{p}" for p, c in sorted(poly.items()))
            out.append({"x_power": str(-j), "coefficient": text or "0"})
        return out


def wave_xbar_series(
    curve: SpectralCurve, e_max: int, engine: Optional[TopologicalRecursion] = None
) -> WaveXbarSeries:
    """
    ψ̄ through x^{−2e_max} from S_0..S_{e_max}.

    S_k contributes ħ^{k−1}u^j with j ≥ 2k on curves whose ψ̄ coefficients
    are Laurent polynomials of span e in ħ, so the truncation is exact there.
    Constant terms of each S_k fix the normalisation of ψ and are dropped.
    """
    if e_max < 1:
        raise GuardError(f"e_max must be >= 1, got {e_max}")
    wave = wave_expansion(curve, e_max, engine)
    top = 2 * e_max
    field = curve.field
    rows = expand_wave_at_infinity(wave, top)
    # exponent in (ħ, v) with u = ħv; ħ^{k−1}u^j ↦ ħ^{k−1+j}v^j
    R, hbar, v = poly_ring("hbar,v", field.domain)
    exponent = R.zero
    dropped = []
    for row in rows:
        if not row.series.is_zero and row.series.valuation < 0:
            raise CurveError(f"S_{row.k} has a pole at x = infinity")
        for j, c in row.series.items():
            if j > top or not c:
                continue
            if j == 0:
                dropped.append((row.k, c))
                continue
            exponent += R({(row.k - 1 + j, j): c})
    if any(row.log_x for row in rows[1:]):
        logger.warning("S_k with k >= 1 carries log x; psi-bar keeps the corresponding power of x")

    def truncate(p):
        terms = {m: c for m, c in p.items() if m[1] <= top}
        return R(terms) if terms else R.zero

    total, power = R.one, R.one
    for m in range(1, top + 1):
        power = truncate(power * exponent)
        if not power:
            break
        total += power * (field.one / field.convert(math.factorial(m)))
    coefficients: List[Dict[int, FieldElement]] = [dict() for _ in range(top + 1)]
    for (a, j), c in total.items():
        if j <= top and c:
            coefficients[j][a - j] = c
    logger.info("psi-bar of %s through x^-%d", curve.name, top)
    return WaveXbarSeries(
        field, e_max, tuple(row.log_x for row in rows), tuple(coefficients), tuple(dropped)
    )


# Example 1 ------------------------------------------------------------------


def first_order_curve(lambdas: Sequence, field: Optional[Field] = None) -> SpectralCurve:
    """x = z, y = Σ 1/(z − λᵢ)."""
    field = field or Field()
    if not lambdas:
        raise QuantumCurveError("first-order curve needs at least one lambda")
    z = RationalFunction.variable(field, "z")
    points = [field.parse(str(lam)) for lam in lambdas]
    y = RationalFunction.constant(field, 0, "z")
    for lam in points:
        y = y + (z - lam) ** -1
    return SpectralCurve(
        name="first_order",
        parameter="z",
        x=z,
        y=LogAugmentedFunction.from_rational(y),
        field=field,
        constants={f"lambda{i + 1}": field.format(lam) for i, lam in enumerate(points)},
    )


def first_order_wave(lambdas: Sequence, order: int, field: Optional[Field] = None) -> WaveExpansion:
    """ψ = ∏(x − λᵢ)^{1/ħ}: S_0 = Σ log(x − λᵢ) and S_k = 0 for k ≥ 1."""
    curve = first_order_curve(lambdas, field)
    s0 = (curve.y * curve.x_prime).integrate()
    zero = LogAugmentedFunction.zero(curve.field, curve.parameter)
    return WaveExpansion(curve, (s0,) + (zero,) * order, primitive="closed")
