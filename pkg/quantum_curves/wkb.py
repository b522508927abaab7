"""
WKB analysis of quantum curves

For ψ = exp(Σ_k ħ^{k−1} S_k) write Y_k = dS_k/dx. The ħ-expansion of
ψ^{−1}P̂ψ is triangular: Y_m first appears at ħ^m with coefficient
∂P_0/∂y(x, y), so the Y_m can be solved one at a time, checked against a
given wave, or used to reconstruct the corrections P_k of an operator.

Differential flavour: ψ^{−1}ŷ^{j+1}ψ = (ħ d/dx + Y)ψ^{−1}ŷ^jψ with Y = Σ ħ^k Y_k.
Difference flavour: ψ^{−1}e^{jŷ}ψ = e^{jY_0}·exp(Σ_{k,m} j^m ħ^{m+k−1}/m!·Y_k^{(m−1)}),
the sum over m ≥ 1 and m + k ≥ 2.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .curve import SpectralCurve
from .errors import CheckFailure, CurveError, GuardError, QuantumCurveError
from .field import Field, FieldElement
from .logfunc import LogAugmentedFunction
from .operators import Graded, OperatorPolynomial, derivative_in_y
from .rational import RationalFunction
from .recursion import TopologicalRecursion
from .wave import WaveExpansion, t_shift, wave_expansion

logger = logging.getLogger(__name__)

MAX_ORDER = 8
MAX_SUPPORT_SEARCH = 2**16


@dataclass(frozen=True)
class ResidualLedger:
    """ħ^k coefficients of ψ^{−1}P̂ψ, k = 0..K."""

    label: str
    field: Field
    residuals: Tuple[RationalFunction, ...]
    variable: str = "hbar"

    @property
    def is_zero(self) -> bool:
        return all(r.is_zero for r in self.residuals)

    def first_nonzero(self) -> Optional[int]:
        return next((k for k, r in enumerate(self.residuals) if not r.is_zero), None)

    def rows(self) -> List[Dict[str, str]]:
        return [{"order": f"{self.variable}^{k}", "residual": r.format()} for k, r in enumerate(self.residuals)]

    def require_zero(self) -> "ResidualLedger":
        k = self.first_nonzero()
        if k is not None:
            raise CheckFailure(f"{self.label} fails at {self.variable}^{k}", self.residuals[k].format())
        return self


class _ExponentAction:
    """
    ψ^{−1}·x̂^iŷ^j·ψ as a truncated ħ-series of rational functions.

    `higher[k − 1]` holds Y_k for k ≥ 1; entries may be replaced between
    calls to `apply`, which clears the derivative cache for that k.
    """

    def __init__(
        self,
        flavour: str,
        curve: SpectralCurve,
        y0: LogAugmentedFunction,
        higher: Sequence[RationalFunction],
    ):
        self.flavour = flavour
        self.curve = curve
        self.field = curve.field
        self.x = curve.x
        self.x_prime = curve.x_prime
        self.zero = RationalFunction.constant(curve.field, 0, curve.parameter)
        self.one = RationalFunction.constant(curve.field, 1, curve.parameter)
        self.higher = list(higher)
        self._derivatives: Dict[Tuple[int, int], RationalFunction] = {}
        self._x_powers = [self.one]
        if flavour == "differential":
            if not y0.is_rational:
                raise QuantumCurveError(
                    f"flavour mismatch: the differential flavour needs a rational y, got {y0.format()}"
                )
            self.y0 = y0.as_rational()
        else:
            try:
                self.unit = y0.exp_rational()
            except QuantumCurveError as exc:
                raise QuantumCurveError(
                    f"flavour mismatch: the difference flavour needs exp(y) rational, got y = {y0.format()}"
                ) from exc
            self._derivatives[(0, 1)] = y0.diff_x(self.x_prime).as_rational()

    def set_higher(self, k: int, value: RationalFunction) -> None:
        while len(self.higher) < k:
            self.higher.append(self.zero)
        self.higher[k - 1] = value
        for key in [key for key in self._derivatives if key[0] == k]:
            del self._derivatives[key]

    def y(self, k: int) -> RationalFunction:
        if k == 0:
            return self.y0
        return self.higher[k - 1] if k <= len(self.higher) else self.zero

    def derivative(self, k: int, r: int) -> RationalFunction:
        """(d/dx)^r Y_k; r ≥ 1 when k = 0 in the difference flavour."""
        key = (k, r)
        if key not in self._derivatives:
            if r == 0:
                self._derivatives[key] = self.y(k)
            else:
                self._derivatives[key] = self.derivative(k, r - 1).diff() / self.x_prime
        return self._derivatives[key]

    def x_power(self, i: int) -> RationalFunction:
        while len(self._x_powers) <= i:
            self._x_powers.append(self._x_powers[-1] * self.x)
        return self._x_powers[i]

    def symbol_value(self, i: int, j: int) -> RationalFunction:
        """x^i·y^j, or x^i·e^{jy} for the difference flavour, on the curve."""
        if self.flavour == "differential":
            return self.x_power(i) * self.y0**j
        return self.x_power(i) * self.unit**j

    def evaluate_symbol(self, poly: Dict[Tuple[int, int], FieldElement]) -> RationalFunction:
        total = self.zero
        for (i, j), c in poly.items():
            total = total + self.symbol_value(i, j) * c
        return total

    # ħ-series of ψ^{−1}(y-monomial)ψ ----------------------------------

    def _powers(self, top: int, order: int) -> List[List[RationalFunction]]:
        """E_0..E_top with E_j = ψ^{−1}ŷ^jψ."""
        series = [self.y(k) for k in range(order + 1)]
        E = [[self.one] + [self.zero] * order]
        for _ in range(top):
            prev = E[-1]
            new = []
            for p in range(order + 1):
                term = prev[p - 1].diff() / self.x_prime if p else self.zero
                for a in range(p + 1):
                    if not prev[p - a].is_zero and not series[a].is_zero:
                        term = term + series[a] * prev[p - a]
                new.append(term)
            E.append(new)
        return E

    def _shift(self, j: int, order: int) -> List[RationalFunction]:
        """ψ^{−1}e^{jŷ}ψ."""
        if j == 0:
            return [self.one] + [self.zero] * order
        exponent = [self.zero]
        for p in range(1, order + 1):
            term = self.zero
            for k in range(p + 1):
                m = p - k + 1
                weight = self.field.convert(j) ** m / self.field.convert(math.factorial(m))
                term = term + self.derivative(k, m - 1) * weight
            exponent.append(term)
        result = [self.one]
        for p in range(1, order + 1):
            term = self.zero
            for s in range(1, p + 1):
                if not exponent[s].is_zero:
                    term = term + exponent[s] * result[p - s] * self.field.convert(s)
            result.append(term / self.field.convert(p))
        unit = self.unit**j
        return [unit * r for r in result]

    def apply(self, op: OperatorPolynomial, order: int) -> List[RationalFunction]:
        """ħ^0..ħ^order coefficients of ψ^{−1}P̂ψ."""
        js = sorted({j for P in op.terms for _, j in P})
        if self.flavour == "differential":
            E = self._powers(max(js), order)
            actions = {j: E[j] for j in js}
        else:
            actions = {j: self._shift(j, order) for j in js}
        total = [self.zero] * (order + 1)
        for k in range(min(op.order, order) + 1):
            for (i, j), c in op.term(k).items():
                xi = self.x_power(i)
                for p in range(k, order + 1):
                    piece = actions[j][p - k]
                    if not piece.is_zero:
                        total[p] = total[p] + xi * piece * c
        return total


def _rational_higher(wave: WaveExpansion, order: int) -> List[RationalFunction]:
    out = []
    for k in range(1, order + 1):
        derivative = wave.derivative(k)
        if not derivative.is_rational:
            raise QuantumCurveError(f"dS_{k}/dx = {derivative.format()} is not rational")
        out.append(derivative.as_rational())
    return out


def _check_order(order: int) -> None:
    if order < 0 or order > MAX_ORDER:
        raise GuardError(f"K must be between 0 and {MAX_ORDER}, got {order}")


@dataclass(frozen=True)
class WKBSystem:
    """dS_k/dx solved from an operator, with the final residual ledger."""

    curve: SpectralCurve
    operator: OperatorPolynomial
    derivatives: Tuple[LogAugmentedFunction, ...]
    ledger: ResidualLedger

    def rows(self) -> List[Dict[str, str]]:
        return [{"k": str(k), "dS_k/dx": d.format()} for k, d in enumerate(self.derivatives)]

    def to_wave(self) -> WaveExpansion:
        """S_k = ∫ (dS_k/dx) dx with zero constants of integration."""
        x_prime = self.curve.x_prime
        terms = tuple((d * x_prime).integrate() for d in self.derivatives)
        return WaveExpansion(self.curve, terms, primitive="wkb")


def wkb_solve(op: OperatorPolynomial, curve: SpectralCurve, order: int) -> WKBSystem:
    """
    Solve ψ^{−1}P̂ψ = 0 order by order for dS_k/dx, k ≤ order.

    Raises:
        CheckFailure: P_0(x, y) does not vanish on the curve
        CurveError: ∂P_0/∂y vanishes identically on the curve
        QuantumCurveError: flavour mismatch between operator and curve
    """
    _check_order(order)
    action = _ExponentAction(op.flavour, curve, curve.y, [])
    classical = action.evaluate_symbol(op.term(0))
    if not classical.is_zero:
        raise CheckFailure(
            f"operator {op.name} does not quantise {curve.name}: P_0 is nonzero on the curve",
            classical.format(),
        )
    slope = action.evaluate_symbol(derivative_in_y(op))
    if slope.is_zero:
        raise CurveError(f"dP/dy vanishes identically on {curve.name}")
    for m in range(1, order + 1):
        action.set_higher(m, action.zero)
        residual = action.apply(op, m)[m]
        action.set_higher(m, -residual / slope)
        logger.info("solved dS_%d/dx for %s on %s", m, op.name, curve.name)
    ledger = ResidualLedger(f"wkb solve of {op.name}", curve.field, tuple(action.apply(op, order)))
    derivatives = (curve.y,) + tuple(
        LogAugmentedFunction.from_rational(action.y(k)) for k in range(1, order + 1)
    )
    return WKBSystem(curve, op, derivatives, ledger)


def verify_quantum_curve(
    op: OperatorPolynomial, wave: WaveExpansion, order: Optional[int] = None
) -> ResidualLedger:
    """
    Residuals of P̂ acting on the wave exponent through ħ^order.

    Example:
        >>> verify_quantum_curve(load_operator("catalan"), wave_expansion(load_curve("catalan"), 4)).is_zero
        True
    """
    order = wave.order if order is None else order
    _check_order(order)
    if order > wave.order:
        raise GuardError(f"wave is known through S_{wave.order}, asked for hbar^{order}")
    action = _ExponentAction(op.flavour, wave.curve, wave.derivative(0), _rational_higher(wave, order))
    ledger = ResidualLedger(
        f"operator {op.name} on {wave.curve.name}", wave.curve.field, tuple(action.apply(op, order))
    )
    if ledger.is_zero:
        logger.info("%s annihilates the wave of %s through hbar^%d", op.name, wave.curve.name, order)
    else:
        logger.warning("%s leaves a residual at hbar^%d", ledger.label, ledger.first_nonzero())
    return ledger


def difference_wkb_check(
    op: OperatorPolynomial,
    curve: SpectralCurve,
    order: int,
    t=None,
    engine: Optional[TopologicalRecursion] = None,
) -> ResidualLedger:
    """
    Check a shift operator against e^{−tħ d/dx} applied to the recursion wave.

    `t` defaults to the operator's constant `t`, or 0 when it has none.
    """
    if op.flavour != "difference":
        raise QuantumCurveError(f"operator {op.name} is not of difference flavour")
    field = curve.field
    if t is None:
        t = field.parse(op.constants["t"]) if "t" in op.constants else field.zero
    t = field.convert(t) if not isinstance(t, str) else field.parse(t)
    wave = wave_expansion(curve, order, engine)
    if t:
        wave = t_shift(wave).at(-t)
    return verify_quantum_curve(op, wave, order)


# reconstruction -------------------------------------------------------------


@dataclass(frozen=True)
class Reconstruction:
    """
    Operator recovered from a wave.

    Attributes:
        operator: P_0 plus the minimal-support corrections
        solution_dimension: dimension of the space of polynomials within the
            bounds that vanish on the curve; each P_k is unique up to it
        supports: number of monomials used by each P_k
    """

    operator: OperatorPolynomial
    solution_dimension: int
    supports: Tuple[int, ...]


def linear_system(
    field: Field, columns: Sequence[RationalFunction], target: RationalFunction
) -> Tuple[List[List[FieldElement]], List[FieldElement]]:
    """Coefficient equations of Σ c_i·columns[i] = target over a common denominator."""
    denominator = target.denom
    for column in columns:
        denominator = denominator.lcm(column.denom)
    polys = [c.numer * denominator.exquo(c.denom) for c in columns]
    rhs = target.numer * denominator.exquo(target.denom)
    top = max([p.degree() for p in polys if p] + [rhs.degree() if rhs else 0])
    matrix = [[field.zero] * len(columns) for _ in range(top + 1)]
    vector = [field.zero] * (top + 1)
    for col, poly in enumerate(polys):
        for (d,), c in poly.terms():
            matrix[d][col] = c
    if rhs:
        for (d,), c in rhs.terms():
            vector[d] = c
    return matrix, vector


def _rref(field: Field, rows: List[List[FieldElement]], width: int):
    M = DomainMatrix(rows, (len(rows), width), field.domain)
    reduced, pivots = M.rref()
    return reduced.to_Matrix(), pivots


def solve_on_support(field, matrix, vector, support) -> Optional[Dict[int, FieldElement]]:
    rows = [[row[c] for c in support] + [b] for row, b in zip(matrix, vector)]
    reduced, pivots = _rref(field, rows, len(support) + 1)
    if len(support) in pivots:
        return None
    return {support[c]: field.convert(reduced[r, len(support)]) for r, c in enumerate(pivots)}


def _kernel_on(field, matrix, support) -> Optional[Dict[int, FieldElement]]:
    rows = [[row[c] for c in support] for row in matrix]
    reduced, pivots = _rref(field, rows, len(support))
    free = [c for c in range(len(support)) if c not in pivots]
    if not free:
        return None
    f = free[0]
    vector = {support[f]: field.one}
    for r, c in enumerate(pivots):
        value = -field.convert(reduced[r, f])
        if value:
            vector[support[c]] = value
    return vector


def _minimal(size: int, attempt):
    for s in range(size + 1):
        for support in itertools.combinations(range(size), s):
            found = attempt(list(support))
            if found is not None:
                return found
    return None


def reconstruct_operator(
    wave: WaveExpansion,
    bounds: Tuple[int, int],
    order: Optional[int] = None,
    p0: Optional[OperatorPolynomial] = None,
) -> Reconstruction:
    """
    Recover a differential operator annihilating the wave, one ħ-order at a time.

    Without `p0` the classical part is the minimal-support polynomial of
    x-degree ≤ d_x and y-degree ≤ d_y vanishing on the curve, normalised so
    its leading monomial has coefficient 1.

    Raises:
        GuardError: bounds negative or the support search too large
        CheckFailure: no correction within the bounds, or `p0` off the curve
    """
    dx, dy = bounds
    if dx < 0 or dy < 0:
        raise GuardError(f"degree bounds must be >= 0, got ({dx}, {dy})")
    order = wave.order if order is None else order
    _check_order(order)
    if order > wave.order:
        raise GuardError(f"wave is known through S_{wave.order}, asked for hbar^{order}")
    monomials = [(i, j) for j in range(dy + 1) for i in range(dx + 1)]
    if 2 ** len(monomials) > MAX_SUPPORT_SEARCH:
        raise GuardError(
            f"support search over {len(monomials)} monomials exceeds 2^16 subsets"
        )
    curve = wave.curve
    field = curve.field
    action = _ExponentAction("differential", curve, wave.derivative(0), _rational_higher(wave, order))
    columns = [action.symbol_value(i, j) for i, j in monomials]
    matrix, _ = linear_system(field, columns, action.zero)
    rank = DomainMatrix(matrix, (len(matrix), len(monomials)), field.domain).rank()
    dimension = len(monomials) - rank

    if p0 is None:
        kernel = _minimal(len(monomials), lambda s: _kernel_on(field, matrix, s) if s else None)
        if kernel is None:
            raise CheckFailure(f"no polynomial of degree ({dx}, {dy}) vanishes on {curve.name}")
        lead = max(kernel, key=lambda c: (monomials[c][1], monomials[c][0]))
        scale = field.one / kernel[lead]
        graded: Graded = {(0, *monomials[c]): v * scale for c, v in kernel.items()}
    else:
        if p0.flavour != "differential":
            raise QuantumCurveError("reconstruction supports the differential flavour only")
        classical = action.evaluate_symbol(p0.term(0))
        if not classical.is_zero:
            raise CheckFailure(f"P_0 of {p0.name} is nonzero on {curve.name}", classical.format())
        graded = {(0, i, j): c for (i, j), c in p0.term(0).items()}
    supports = [len(graded)]

    for k in range(1, order + 1):
        current = OperatorPolynomial.from_graded("differential", field, graded, name="reconstructed")
        residual = action.apply(current, k)[k]
        matrix_k, vector = linear_system(field, columns, -residual)
        if solve_on_support(field, matrix_k, vector, list(range(len(monomials)))) is None:
            raise CheckFailure(f"no correction P_{k} within bounds ({dx}, {dy})", residual.format())
        solution = _minimal(len(monomials), lambda s: solve_on_support(field, matrix_k, vector, s))
        nonzero = {c: v for c, v in solution.items() if v}
        for c, v in nonzero.items():
            graded[(k, *monomials[c])] = v
        supports.append(len(nonzero))
        logger.info("P_%d reconstructed with %d monomials", k, len(nonzero))

    operator = OperatorPolynomial.from_graded("differential", field, graded, name="reconstructed")
    return Reconstruction(operator, dimension, tuple(supports))
