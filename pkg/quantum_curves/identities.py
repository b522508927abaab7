"""
Identities satisfied by the invariants

String and dilaton equations, free energies, the local Airy model at each
branch point, invariance under y ↦ y + g′(x) and the specialised loop
equation of the Catalan curve. Every check returns its exact residual;
`require_zero` turns a nonzero residual into CheckFailure.

Both residue identities use the convention sign ε of the engine
(ε = +1 for "quantum", −1 for "displayed"):

    Σ_α Res x^m y ω^g_{n+1}(z, z_S) − ε Σ_j dz_j ∂_j(x^m(z_j) ω^g_n(z_S)/dx(z_j))
    Σ_α Res Φ ω^g_{n+1}(z, z_S) − ε (2 − 2g − n) ω^g_n(z_S)
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import sympy

from .curve import SpectralCurve, load_curve
from .errors import CheckFailure, CurveError, GuardError
from .field import Field, FieldElement
from .logfunc import LogAugmentedFunction
from .rational import RationalFunction
from .recursion import (
    Key,
    Multidifferential,
    PoleBasisIndex,
    TopologicalRecursion,
    check_stable,
    distinct,
    merge,
    remove_one,
)
from .series import principal_parts
from .wave import primitive_principal, quantum_omega

logger = logging.getLogger(__name__)

# branch index of the polynomial terms z^d dz in a residual key
POLYNOMIAL = -1


def stable_pairs(chi_max: int, chi_min: int = 1) -> Iterator[Tuple[int, int]]:
    """Stable (g, n) with chi_min <= 2g − 2 + n <= chi_max, by increasing 2g − 2 + n."""
    for chi in range(max(chi_min, 1), chi_max + 1):
        for g in range(chi // 2 + 2):
            n = chi + 2 - 2 * g
            if n >= 1:
                yield g, n


@dataclass(frozen=True)
class IdentityResidual:
    """
    Exact residual of an identity between multidifferentials.

    Keys are sorted tuples of PoleBasisIndex; besides the pole basis they
    may hold (b, 0) for a simple pole and (POLYNOMIAL, d) for z^d dz.
    """

    name: str
    g: int
    n: int
    field: Field
    alphas: Tuple[FieldElement, ...]
    terms: Mapping[Key, FieldElement]
    symbol: str = "z"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def format_slot(self, v: PoleBasisIndex) -> str:
        if v.branch == POLYNOMIAL:
            return f"{self.symbol}^{v.k}"
        return f"[{self.field.format(self.alphas[v.branch])}:{v.k}]"

    def format_key(self, key: Key) -> str:
        return " ".join(self.format_slot(v) for v in key) or "1"

    def format(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"({self.field.format(c)})*{self.format_key(key)}"
            for key, c in sorted(self.terms.items())
        )

    def rows(self) -> List[Dict[str, str]]:
        return [
            {"slots": self.format_key(key), "residual": self.field.format(c)}
            for key, c in sorted(self.terms.items())
        ]

    def require_zero(self) -> "IdentityResidual":
        if self.terms:
            raise CheckFailure(
                f"{self.name} fails for (g, n) = ({self.g}, {self.n})", self.format()
            )
        return self


def _residual(
    name: str, g: int, n: int, engine: TopologicalRecursion, table: Dict[Key, FieldElement]
) -> IdentityResidual:
    terms = {k: c for k, c in table.items() if c}
    result = IdentityResidual(
        name, g, n, engine.field, engine.alphas, terms, engine.curve.parameter
    )
    if terms:
        logger.warning("%s residual for (g, n) = (%d, %d) has %d terms", name, g, n, len(terms))
    else:
        logger.info("%s holds for (g, n) = (%d, %d)", name, g, n)
    return result


def _add(table: Dict[Key, FieldElement], key: Key, value: FieldElement) -> None:
    if value:
        table[key] = table[key] + value if key in table else value


def _contract_first_slot(
    engine: TopologicalRecursion, f: LogAugmentedFunction, omega: Multidifferential
) -> Dict[Key, FieldElement]:
    """
    Σ_α Res_{z=α} f(z) ω(z, z_S) as tensor data in z_S.

    Res (z − α)^{−k−1} f dz is the s^k coefficient of f(α + s). Constant
    logs in the local expansions of f must drop out of the total.

    Raises:
        CurveError: a constant log survives
    """
    top = max((v.k for key, _ in omega.items() for v in key), default=0)
    locals_ = [f.series_at(alpha, top) for alpha in engine.alphas]
    table: Dict[Key, FieldElement] = {}
    leftovers: Dict[FieldElement, Dict[Key, FieldElement]] = {}
    for key, c in omega.items():
        for v in distinct(key):
            rest = remove_one(key, v)
            local = locals_[v.branch]
            _add(table, rest, c * local.series.coefficient(v.k))
            for value, coefficient in local.log_constants:
                _add(leftovers.setdefault(value, {}), rest, c * coefficient.coefficient(v.k))
    for value, part in leftovers.items():
        if any(part.values()):
            raise CurveError(
                f"residue against {f.format()} picks up the constant log({engine.field.format(value)})"
            )
    return table


def _apply_slot_operator(
    engine: TopologicalRecursion, m: int, v: PoleBasisIndex, cache: Dict
) -> Dict[PoleBasisIndex, FieldElement]:
    """d/dz(x^m e_v/x′) in the extended basis."""
    if v in cache:
        return cache[v]
    curve = engine.curve
    z = RationalFunction.variable(engine.field, curve.parameter)
    basis = (z - engine.alphas[v.branch]) ** (-v.k - 1)
    value = (curve.x**m * basis / curve.x_prime).diff()
    parts, polynomial = principal_parts(value, list(engine.alphas))
    out = {PoleBasisIndex(b, k): c for (b, k), c in parts.items() if c}
    for d, c in enumerate(polynomial.coefficients()):
        if c:
            out[PoleBasisIndex(POLYNOMIAL, d)] = c
    cache[v] = out
    return out


def check_string(
    curve: SpectralCurve, g: int, n: int, m: int, engine: Optional[TopologicalRecursion] = None
) -> IdentityResidual:
    """
    Residual of the string equation for x^m, m = 0 or 1.

    Raises:
        GuardError: m outside {0, 1} or (g, n) unstable
    """
    if m not in (0, 1):
        raise GuardError(f"m must be 0 or 1, got {m}")
    check_stable(g, n)
    engine = engine or TopologicalRecursion(curve)
    table = _contract_first_slot(engine, curve.y * curve.x**m, engine.omega(g, n + 1))

    sign = engine.field.convert(engine.sign)
    cache: Dict = {}
    for key, c in engine.omega(g, n).items():
        for v in distinct(key):
            rest = remove_one(key, v)
            for w, h in _apply_slot_operator(engine, m, v, cache).items():
                target = merge(rest, (w,))
                multiplicity = engine.field.convert(Counter(target)[w])
                _add(table, target, -(sign * c * h * multiplicity))
    return _residual(f"string equation (m = {m})", g, n, engine, table)


def antiderivative(curve: SpectralCurve, shift: Optional[FieldElement] = None) -> LogAugmentedFunction:
    """Φ = ∫ y dx with zero integration constant, plus an optional shift."""
    phi = (curve.y * curve.x_prime).integrate()
    return phi + shift if shift is not None else phi


def check_dilaton(
    curve: SpectralCurve,
    g: int,
    n: int,
    engine: Optional[TopologicalRecursion] = None,
    shift: Optional[FieldElement] = None,
) -> IdentityResidual:
    """
    Residual of the dilaton equation.

    Raises:
        GuardError: (g, n) unstable
    """
    check_stable(g, n)
    engine = engine or TopologicalRecursion(curve)
    table = _contract_first_slot(engine, antiderivative(curve, shift), engine.omega(g, n + 1))
    factor = engine.field.convert(engine.sign * (2 - 2 * g - n))
    for key, c in engine.omega(g, n).items():
        _add(table, key, -(factor * c))
    return _residual("dilaton equation", g, n, engine, table)


def free_energy(
    curve: SpectralCurve,
    g: int,
    engine: Optional[TopologicalRecursion] = None,
    shift: Optional[FieldElement] = None,
) -> FieldElement:
    """
    F_g = Σ_α Res Φ ω^g_1 in the quantum normalisation.

    Example:
        On the Airy curve Φ = 2z³/3 and F_1 = −1/24.

    Raises:
        GuardError: g < 1
    """
    if g < 1:
        raise GuardError(f"free energy needs g >= 1, got {g}")
    if g == 1:
        logger.warning("F_1 from the residue formula is not a regularised genus-one free energy")
    engine = engine or TopologicalRecursion(curve)
    table = _contract_first_slot(engine, antiderivative(curve, shift), quantum_omega(engine, g, 1))
    return table.get((), engine.field.zero)


# local Airy model ----------------------------------------------------------


def airy_scaling_check(
    curve: SpectralCurve, g: int, n: int, engine: Optional[TopologicalRecursion] = None
) -> IdentityResidual:
    """
    Compare the top-degree part of ω^g_n at each branch point with the Airy curve.

    With x = x(α) + x₂s² + … and y = y(α) + y₁s + …, the coefficients of
    keys with every slot at α and Σk = 6g − 6 + 3n equal the Airy values
    times (x₂y₁)^{2−2g−n}.
    """
    check_stable(g, n)
    engine = engine or TopologicalRecursion(curve)
    airy = TopologicalRecursion(load_curve("airy"), convention=engine.convention)
    reference = airy.omega(g, n)
    omega = engine.omega(g, n)
    field = engine.field
    degree = 6 * g - 6 + 3 * n
    chi = 2 - 2 * g - n
    table: Dict[Key, FieldElement] = {}
    for point in engine.data.points:
        base = point.x2 * point.y1
        scale = base**chi if chi >= 0 else (field.one / base) ** (-chi)
        for key, c in omega.items():
            if all(v.branch == point.index for v in key) and sum(v.k for v in key) == degree:
                _add(table, key, c)
        for key, c in reference.items():
            local = tuple(PoleBasisIndex(point.index, v.k) for v in key)
            _add(table, local, -(field.convert(c) * scale))
    return _residual("Airy scaling", g, n, engine, table)


# y ↦ y + g′(x) ---------------------------------------------------------------


def shift_curve(curve: SpectralCurve, g: RationalFunction, name: Optional[str] = None) -> SpectralCurve:
    """
    The curve with y replaced by y + g′(x).

    `g` is a polynomial in x written in the curve parameter's symbol.
    """
    return curve.with_y(curve.y + g.diff().compose(curve.x), name or f"{curve.name}_shifted")


def invariance_residuals(
    curve: SpectralCurve,
    g: RationalFunction,
    chi_max: int = 2,
    engine: Optional[TopologicalRecursion] = None,
) -> List[IdentityResidual]:
    """ω^h_n of the curve minus those of its y + g′(x) shift, for 2h − 2 + n <= chi_max."""
    engine = engine or TopologicalRecursion(curve)
    shifted = TopologicalRecursion(shift_curve(curve, g), convention=engine.convention)
    if list(shifted.alphas) != list(engine.alphas):
        raise CurveError("shifting y moved the branch points")
    out = []
    for h, n in stable_pairs(chi_max):
        table: Dict[Key, FieldElement] = {}
        for key, c in engine.omega(h, n).items():
            _add(table, key, c)
        for key, c in shifted.omega(h, n).items():
            _add(table, key, -c)
        out.append(_residual("invariance under y -> y + g'(x)", h, n, engine, table))
    return out


# loop equation of the Catalan curve -------------------------------------------


class _LoopTerms:
    """Primitives F^g_n(u, z, …, z) of the Catalan curve as sympy expressions."""

    def __init__(self, engine: TopologicalRecursion):
        self.engine = engine
        curve = engine.curve
        self.z = sympy.Symbol(curve.parameter)
        self.u = sympy.Dummy("u")
        self.x = curve.x.to_sympy(self.z)
        self.x_prime = curve.x_prime.to_sympy(self.z)
        self.y = curve.y.as_rational().to_sympy(self.z)
        self._cache: Dict[Tuple[int, int], sympy.Expr] = {}

    def d_x(self, expr: sympy.Expr, symbol=None) -> sympy.Expr:
        symbol = symbol if symbol is not None else self.z
        return sympy.diff(expr, symbol) / self.x_prime.subs(self.z, symbol)

    def primitive(self, g: int, n: int) -> sympy.Expr:
        if (g, n) not in self._cache:
            u, z = self.u, self.z
            if (g, n) == (0, 2):
                x_u = self.x.subs(z, u)
                expr = -sympy.log(sympy.cancel((x_u - self.x) / (u - z)))
            else:
                F = primitive_principal(quantum_omega(self.engine, g, n))
                expr = F.to_sympy([u] + [z] * (n - 1))
            self._cache[(g, n)] = expr
        return self._cache[(g, n)]

    def diagonal_derivative(self, g: int, n: int) -> sympy.Expr:
        """d/dx F^g_n(x, …, x)."""
        if (g, n) == (0, 1):
            return self.y
        return self.d_x(self.primitive(g, n).subs(self.u, self.z))

    def diagonal_second(self, g: int, n: int) -> sympy.Expr:
        """d²/dx² F^g_n(x, …, x)."""
        return self.d_x(self.diagonal_derivative(g, n))

    def first_slot_second(self, g: int, n: int) -> sympy.Expr:
        """∂²_u F^g_n(u, x, …, x) at u = x."""
        first = self.d_x(self.primitive(g, n), self.u)
        return self.d_x(first, self.u).subs(self.u, self.z)


def _exists(g: int, n: int) -> bool:
    return g >= 0 and n >= 1 and 2 * g - 2 + n >= -1


def check_loop_equation(
    curve: SpectralCurve, g: int, n: int, engine: Optional[TopologicalRecursion] = None
) -> RationalFunction:
    """
    Residual of the loop equation specialised to x₁ = … = x_n = x.

    Only the Catalan curve x = z + 1/z, y = 1/z satisfies it; the residual
    comes back as a rational function of z.

    Raises:
        GuardError: (g, n) unstable
        CurveError: the curve is not the Catalan curve
    """
    check_stable(g, n)
    field = curve.field
    z = RationalFunction.variable(field, curve.parameter)
    if curve.x != z + z**-1 or curve.y != LogAugmentedFunction.from_rational(z**-1):
        raise CurveError("the specialised loop equation holds on the Catalan curve only")
    engine = engine or TopologicalRecursion(curve)
    terms = _LoopTerms(engine)
    lhs = terms.x * terms.diagonal_derivative(g, n) / n

    rhs = sympy.Integer(0)
    for g1 in range(g + 1):
        g2 = g - g1
        for i in range(n):
            if not (_exists(g1, i + 1) and _exists(g2, n - i)):
                continue
            rhs += (
                sympy.binomial(n - 1, i)
                * terms.diagonal_derivative(g1, i + 1) / (i + 1)
                * terms.diagonal_derivative(g2, n - i) / (n - i)
            )
    if g >= 1:
        rhs += terms.diagonal_second(g - 1, n + 1) / (n * (n + 1))
        rhs -= terms.first_slot_second(g - 1, n + 1) / n
    if n >= 2 and _exists(g, n - 1):
        rhs += (n - 1) * terms.first_slot_second(g, n - 1)

    residual = sympy.cancel(sympy.together(lhs - rhs))
    logger.info("loop equation for (g, n) = (%d, %d): residual %s", g, n, residual)
    return RationalFunction.from_sympy(residual, field, curve.parameter)
