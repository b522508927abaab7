"""
Gromov-Witten theory of P¹ at q = 1

Degree-zero wave ψ₀ = exp F₀ in u = ħ/x, the rational ratios
r_d = ψ_d/ψ₀ in w = x/ħ − t with q absorbed into Q = q/ħ², the Toda relation
they satisfy, and a comparison of the recursion wave with F₀.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import ring as poly_ring

from .curve import SpectralCurve
from .errors import CheckFailure, GuardError
from .field import FieldElement
from .logfunc import LogAugmentedFunction
from .oracles import QQ_FIELD, zeta_negative_odd
from .rational import RationalFunction
from .recursion import TopologicalRecursion
from .wave import WaveExpansion, expand_wave_at_infinity, t_shift, wave_expansion
from .wkb import ResidualLedger, linear_system, solve_on_support

logger = logging.getLogger(__name__)

MAX_PSI0_ORDER = 8
MAX_RATIO_DEGREE = 6

HALF = QQ(1, 2)

_RING, _T, _U = poly_ring("t,u", QQ)


def _check_order(K: int) -> None:
    if K < 1 or K > MAX_PSI0_ORDER:
        raise GuardError(f"K must be between 1 and {MAX_PSI0_ORDER}, got {K}")


def _truncate(p, K: int):
    terms = {m: c for m, c in p.items() if m[1] <= K}
    return _RING(terms) if terms else _RING.zero


def _exp(p, K: int):
    """exp of a series without u⁰ term."""
    total, power = _RING.one, _RING.one
    for m in range(1, K + 1):
        power = _truncate(power * p, K)
        if not power:
            break
        total += power * QQ(1, math.factorial(m))
    return total


def _u_coefficients(p, K: int) -> Tuple[RationalFunction, ...]:
    """Coefficients of u⁰..u^K as polynomials in t."""
    dense: List[Dict[int, FieldElement]] = [dict() for _ in range(K + 1)]
    for (a, b), c in p.items():
        if b <= K:
            dense[b][a] = c
    rows = []
    for coeffs in dense:
        top = max(coeffs, default=-1)
        rows.append(
            RationalFunction.from_coefficients(
                QQ_FIELD, [coeffs.get(a, QQ(0)) for a in range(top + 1)], "t"
            )
        )
    return tuple(rows)


# degree zero ----------------------------------------------------------------


def phi_coefficient(g: int) -> FieldElement:
    """(1 − 2^{1−2g})ζ(1 − 2g)/(2g − 1)."""
    return (1 - QQ(1, 2 ** (2 * g - 1))) * zeta_negative_odd(g) / (2 * g - 1)


@dataclass(frozen=True)
class DegreeZeroWave:
    """
    F₀ = log ψ₀ through u^K as a polynomial in (t, u), u = ħ/x.

    F₀ = Σ_k t^{k+1}u^k/(k(k + 1)) + Σ_g φ_g u^{2g−1}(1 − tu)^{1−2g}: the
    first sum is the closed part of the unstable terms, the second expands
    φ(x − ħt) with φ(x) = Σ_g φ_g (ħ/x)^{2g−1}.
    """

    order: int
    exponent: object

    def coefficients(self) -> Tuple[RationalFunction, ...]:
        return _u_coefficients(self.exponent, self.order)

    def coefficient(self, k: int) -> RationalFunction:
        return self.coefficients()[k]

    def shifted(self, a: int = -1):
        """F₀(t + a)."""
        return self.exponent.compose(_T, _T + a)

    def rows(self) -> List[Dict[str, str]]:
        return [
            {"u_power": str(k), "coefficient": c.format()}
            for k, c in enumerate(self.coefficients())
            if k
        ]


def gw_psi0(K: int) -> DegreeZeroWave:
    """
    Degree-zero wave through (ħ/x)^K.

    Raises:
        GuardError: K outside 1..8
    """
    _check_order(K)
    F = _RING.zero
    for k in range(1, K + 1):
        F += _T ** (k + 1) * _U**k * QQ(1, k * (k + 1))
    for g in range(1, (K + 1) // 2 + 1):
        n = 2 * g - 1
        c = phi_coefficient(g)
        # (1 − tu)^{−n} = Σ_m binom(n + m − 1, m)(tu)^m
        for m in range(K - n + 1):
            F += _T**m * _U ** (n + m) * (c * math.comb(n + m - 1, m))
    logger.info("degree-zero F_0 through u^%d", K)
    return DegreeZeroWave(K, F)


def _ledger(label: str, residual, K: int) -> ResidualLedger:
    return ResidualLedger(label, QQ_FIELD, _u_coefficients(residual, K), variable="u")


def _log_factor(K: int):
    """log(1 − (t − ½)u) through u^K."""
    a = _T - HALF
    return -sum((a**m * _U**m * QQ(1, m) for m in range(1, K + 1)), _RING.zero)


def degree_zero_recursion_check(K: int) -> ResidualLedger:
    """ψ₀(t − 1) − (1 − (t − ½)u)ψ₀(t), coefficient by coefficient in u."""
    wave = gw_psi0(K)
    left = _exp(_truncate(wave.shifted(-1), K), K)
    right = _truncate((1 - (_T - HALF) * _U) * _exp(wave.exponent, K), K)
    return _ledger("degree-zero recursion", left - right, K)


def gw_log_check(K: int) -> ResidualLedger:
    """F₀(t − 1) − F₀(t) − log(1 − (t − ½)u)."""
    wave = gw_psi0(K)
    residual = _truncate(wave.shifted(-1), K) - wave.exponent - _log_factor(K)
    return _ledger("degree-zero log recursion", residual, K)


def gw_degree_zero_eigen_check(K: int) -> ResidualLedger:
    """
    (ħ∂_x + ∂_t)ψ₀ = (tħ/x)ψ₀; on F₀ in u = ħ/x this reads
    −u²∂_u F₀ + ∂_t F₀ = tu.
    """
    F = gw_psi0(K).exponent
    residual = _truncate(-(_U**2) * F.diff(_U) + F.diff(_T), K) - _T * _U
    return _ledger("degree-zero eigenvalue", residual, K)


# ratios ψ_d/ψ₀ ----------------------------------------------------------------


def _check_ratio_degree(d: int) -> None:
    if d < 0 or d > MAX_RATIO_DEGREE:
        raise GuardError(f"d must be between 0 and {MAX_RATIO_DEGREE}, got {d}")


def _pole(i: int) -> RationalFunction:
    """1/(w − i + ½)."""
    w = RationalFunction.variable(QQ_FIELD, "w")
    return (w - (i - HALF)) ** -1


@lru_cache(maxsize=None)
def gw_psi_ratio(d: int) -> RationalFunction:
    """
    r_d(w) from (w + ½)[r_d(w + 1) − r_d(w)] + r_{d−1}(w − 1)/(w − ½) = 0 with
    r_d → 1/d! at w = ∞, solved as a linear system in the residues at
    w = ½, …, d − ½.

    Raises:
        GuardError: d outside 0..6
        CheckFailure: the system has no solution
    """
    _check_ratio_degree(d)
    w = RationalFunction.variable(QQ_FIELD, "w")
    if d == 0:
        return RationalFunction.constant(QQ_FIELD, 1, "w")
    previous = gw_psi_ratio(d - 1)
    columns = [(w + HALF) * (_pole(i).shift(1) - _pole(i)) for i in range(1, d + 1)]
    target = -previous.shift(-1) / (w - HALF)
    matrix, vector = linear_system(QQ_FIELD, columns, target)
    solution = solve_on_support(QQ_FIELD, matrix, vector, list(range(d)))
    if solution is None:
        raise CheckFailure(f"no ratio r_{d} with simple poles at 1/2, ..., {d} - 1/2")
    ratio = RationalFunction.constant(QQ_FIELD, QQ(1, math.factorial(d)), "w")
    for i, a in solution.items():
        ratio = ratio + _pole(i + 1) * a
    logger.info("r_%d solved", d)
    return ratio


@lru_cache(maxsize=None)
def _residues(d: int) -> Tuple[FieldElement, ...]:
    """(a_{0,d}, …, a_{d,d})."""
    if d == 0:
        return (QQ(1),)
    previous = _residues(d - 1)
    a = [QQ(0)] * (d + 2)
    a[0] = QQ(1, math.factorial(d))
    for i in range(d, 1, -1):
        a[i] = a[i + 1] + previous[i - 1] / (i * (i - 1))
    a[1] = a[2] + _from_residues(previous).evaluate(-HALF)
    return tuple(a[: d + 1])


def _from_residues(residues: Tuple[FieldElement, ...]) -> RationalFunction:
    ratio = RationalFunction.constant(QQ_FIELD, residues[0], "w")
    for i, a in enumerate(residues[1:], start=1):
        if a:
            ratio = ratio + _pole(i) * a
    return ratio


def psi_ratio_from_residues(d: int) -> RationalFunction:
    """
    r_d from a_{i,d} = a_{i+1,d} + a_{i−1,d−1}/(i(i − 1)) for i ≥ 2,
    a_{1,d} = a_{2,d} + r_{d−1}(−½) and a_{d+1,d} = 0.
    """
    _check_ratio_degree(d)
    return _from_residues(_residues(d))


def ratio_poles(r: RationalFunction) -> List[Tuple[FieldElement, int]]:
    """Roots of the denominator of r with multiplicities."""
    _, factors = r.factor()
    return sorted((f.linear_root(), -m) for f, m in factors if m < 0)


# Toda ------------------------------------------------------------------------


def _series_mul(a: List[RationalFunction], b: List[RationalFunction], top: int):
    zero = RationalFunction.constant(QQ_FIELD, 0, "w")
    return [sum((a[i] * b[m - i] for i in range(m + 1)), zero) for m in range(top + 1)]


def _series_inverse(a: List[RationalFunction], top: int):
    """1/a for a[0] = 1."""
    zero = RationalFunction.constant(QQ_FIELD, 0, "w")
    out = [RationalFunction.constant(QQ_FIELD, 1, "w")]
    for m in range(1, top + 1):
        out.append(-sum((a[i] * out[m - i] for i in range(1, m + 1)), zero))
    return out


def _series_log(a: List[RationalFunction], top: int):
    """log a for a[0] = 1, via m·L_m = m·a_m − Σ_{k<m} k·L_k·a_{m−k}."""
    zero = RationalFunction.constant(QQ_FIELD, 0, "w")
    out = [zero]
    for m in range(1, top + 1):
        correction = sum((out[k] * a[m - k] * k for k in range(1, m)), zero)
        out.append(a[m] - correction / m)
    return out


def toda_check(order: int = 1) -> ResidualLedger:
    """
    ψ(t − 1)ψ(t + 1)/ψ(t)² − ħ²∂_q(q∂_q log ψ) for ψ = ψ₀ Σ_d Q^d r_d,
    coefficient by coefficient in Q = q/ħ².

    The degree-zero factor contributes (w + ½)/(w − ½); t − 1 is w + 1.
    """
    if order < 0 or order + 1 > MAX_RATIO_DEGREE:
        raise GuardError(f"Toda order must be between 0 and {MAX_RATIO_DEGREE - 1}, got {order}")
    w = RationalFunction.variable(QQ_FIELD, "w")
    top = order + 1
    R = [gw_psi_ratio(d) for d in range(top + 1)]
    forward = [r.shift(1) for r in R]
    backward = [r.shift(-1) for r in R]
    inverse = _series_inverse(R, order)
    lhs = _series_mul(_series_mul(forward, backward, order), _series_mul(inverse, inverse, order), order)
    factor = (w + HALF) / (w - HALF)
    L = _series_log(R, top)
    residuals = tuple(lhs[m] * factor - L[m + 1] * (m + 1) ** 2 for m in range(order + 1))
    return ResidualLedger("Toda relation", QQ_FIELD, residuals, variable="Q")


# recursion wave against degree zero -------------------------------------------


@dataclass(frozen=True)
class WaveComparison:
    t: FieldElement
    wave_coefficient: FieldElement
    degree_zero_coefficient: FieldElement

    @property
    def residual(self) -> FieldElement:
        return self.wave_coefficient - self.degree_zero_coefficient

    def row(self) -> Dict[str, str]:
        fmt = QQ_FIELD.format
        return {
            "t": fmt(self.t),
            "S2_u1": fmt(self.wave_coefficient),
            "F0_u1": fmt(self.degree_zero_coefficient),
            "residual": fmt(self.residual),
        }


def gw_wave_check(
    curve: SpectralCurve, t=0, engine: Optional[TopologicalRecursion] = None
) -> WaveComparison:
    """
    The ħ/x coefficient of S_2(t) at x = ∞ against the u¹ coefficient of F₀.

    Only degree zero reaches ħ¹x⁻¹, so the two agree for every t; at t = 0
    both are ζ(−1)/2 = −1/24.
    """
    t = QQ_FIELD.convert(t) if not isinstance(t, str) else QQ_FIELD.parse(t)
    wave = wave_expansion(curve, 2, engine)
    if t:
        wave = t_shift(wave).at(-t)
    zero = LogAugmentedFunction.zero(curve.field, curve.parameter)
    stable = WaveExpansion(curve, (zero, zero, wave[2]), wave.primitive)
    row = expand_wave_at_infinity(stable, 1)[2]
    expected = gw_psi0(1).coefficient(1).evaluate(t)
    return WaveComparison(t, row.series.coefficient(1), expected)
