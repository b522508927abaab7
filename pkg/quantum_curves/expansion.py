"""
Expansions at x = ∞

Every variable is expanded at the point z = ∞ of the curve, where x has a
simple pole, in the coordinate u = 1/x obtained by reverting u(w) = 1/x(1/w).
The coefficient of ∏ x_i^{−μ_i−1} in ω^g_n/dx₁⋯dx_n is W(μ); read in the
Belyi normalisation it is M_{g,n}(μ)·∏μ_i, and on the GW(P¹) curve it gives
stationary invariants.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from sympy.polys.rings import ring as poly_ring
from sympy.utilities.iterables import multiset_permutations

from .curve import SpectralCurve
from .errors import CurveError, GuardError
from .field import Field, FieldElement
from .recursion import CONVENTIONS, Multidifferential, PoleBasisIndex, TopologicalRecursion
from .series import INFINITY, LaurentSeries, series_expand, series_log

logger = logging.getLogger(__name__)

Profile = Tuple[int, ...]


@dataclass(frozen=True)
class ExpansionRow:
    mu: Profile
    w: FieldElement
    m: FieldElement


@dataclass(frozen=True)
class XExpansion:
    """
    Coefficient table of ω^g_n at x = ∞ for all profiles with Σμ < depth.

    For (0,1), `derivative[μ]` is the coefficient of x^{−μ−1} in y = dF⁰₁/dx
    and `log_coefficient` the coefficient of log x in y; its rows carry
    W = derivative[μ] and M = W/μ.
    """

    g: int
    n: int
    depth: int
    field: Field
    rows: Tuple[ExpansionRow, ...]
    derivative: Tuple[FieldElement, ...] = ()
    log_coefficient: Optional[FieldElement] = None

    def _row(self, mu) -> Optional[ExpansionRow]:
        mu = tuple(sorted(mu, reverse=True))
        for row in self.rows:
            if row.mu == mu:
                return row
        if sum(mu) >= self.depth:
            raise GuardError(f"profile {mu} is beyond depth {self.depth}")
        return None

    def w(self, *mu: int) -> FieldElement:
        row = self._row(mu)
        return row.w if row else self.field.zero

    def belyi(self, *mu: int) -> FieldElement:
        """M_{g,n}(μ)."""
        row = self._row(mu)
        return row.m if row else self.field.zero

    def f_coefficient(self, *mu: int) -> FieldElement:
        """Coefficient of ∏x_i^{−μ_i} in F^g_n, i.e. (−1)ⁿ M_{g,n}(μ)."""
        value = self.belyi(*mu)
        return -value if self.n % 2 else value


def profiles(n: int, below: int) -> Iterator[Profile]:
    """Non-increasing n-tuples of positive integers with sum < below."""

    def rec(prefix: Tuple[int, ...], largest: int, remaining: int, room: int):
        if remaining == 0:
            yield prefix
            return
        for part in range(min(largest, room - remaining + 1), 0, -1):
            yield from rec(prefix + (part,), part, remaining - 1, room - part)

    if n >= 1 and below > n:
        yield from rec((), below - n, n, below - 1)


def inverse_coordinate(curve: SpectralCurve, order: int) -> LaurentSeries:
    """w(u) with w = 1/z and u = 1/x near z = ∞, through u^order."""
    xs = series_expand(curve.x, INFINITY, order)
    if xs.is_zero or xs.valuation != -1:
        raise CurveError(
            f"x = {curve.x.format()} does not have a simple pole at {curve.parameter} = infinity"
        )
    return xs.inverse().revert()


def log_parameter(w: LaurentSeries) -> Tuple[FieldElement, LaurentSeries]:
    """
    log z in terms of log x: with z = 1/w and x = 1/u,
    log z = log x − log c − L(u) where c = w′(0). Returns (c, L).
    """
    ratio = w.shift(-1)
    leading = ratio.coeffs[0]
    return leading, series_log(ratio.scale(ratio.field.one / leading))


def _slot_series(
    field: Field, alpha: FieldElement, k: int, w: LaurentSeries, jacobian: LaurentSeries, order: int
) -> LaurentSeries:
    """(z − α)^{−k−1} dz/dx as a series in u."""
    # (z − α)^{−k−1} = w^{k+1}(1 − αw)^{−k−1}
    coeffs = [field.convert(math.comb(k + j, j)) * alpha**j for j in range(order + 1)]
    local = LaurentSeries.make(field, k + 1, coeffs, order + k + 1)
    return local.compose(w).mul(jacobian, order)


def _check_depth(depth: int) -> None:
    if depth < 1:
        raise GuardError(f"depth must be >= 1, got {depth}")


def x_expansion(
    curve: SpectralCurve, omega: Multidifferential, depth: int, convention: str = "quantum"
) -> XExpansion:
    """
    Expand ω^g_n at x = ∞ for every profile with Σμ < depth.

    Raises:
        GuardError: depth < 1
        CurveError: x has no simple pole at z = ∞
    """
    _check_depth(depth)
    field = curve.field
    w = inverse_coordinate(curve, depth + 3)
    if (omega.g, omega.n) == (0, 1):
        return _unstable_one(curve, w, depth)
    if (omega.g, omega.n) == (0, 2):
        return _unstable_two(field, w, depth)

    # dz/dx = u²·w′(u)/w(u)²
    jacobian = w.derivative().mul(w.pow(-2)).shift(2).truncate(depth)
    slots: Dict[PoleBasisIndex, List[FieldElement]] = {}
    for key, _ in omega.items():
        for v in key:
            if v not in slots:
                series = _slot_series(field, omega.alphas[v.branch], v.k, w, jacobian, depth)
                slots[v] = series.dense(0, depth)
    sign = 1 if CONVENTIONS[convention] > 0 or omega.n % 2 == 0 else -1
    rows = []
    orderings = {key: [tuple(p) for p in multiset_permutations(list(key))] for key, _ in omega.items()}
    for mu in profiles(omega.n, depth):
        total = field.zero
        for key, c in omega.items():
            for ordering in orderings[key]:
                term = c
                for v, m in zip(ordering, mu):
                    term = term * slots[v][m + 1]
                    if not term:
                        break
                total += term
        weight = field.convert(sign * math.prod(mu))
        rows.append(ExpansionRow(mu, total, total * (field.one / weight)))
    logger.info("x-expansion of omega^%d_%d: %d profiles", omega.g, omega.n, len(rows))
    return XExpansion(omega.g, omega.n, depth, field, tuple(rows))


def _unstable_one(curve: SpectralCurve, w: LaurentSeries, depth: int) -> XExpansion:
    field = curve.field
    log_z, rest = curve.y.series_at_infinity(depth + 2)
    for value, coefficient in rest.log_constants:
        if any(k != 0 for k, _ in coefficient.items()):
            raise CurveError(f"y carries log({field.format(value)}) with a nonconstant coefficient")
    y = rest.series.compose(w)
    if log_z:
        leading, correction = log_parameter(w)
        y = y - correction.scale(log_z)
        if leading != field.one:
            logger.debug("dropping the constant log(%s) from y", field.format(leading))
    derivative = tuple(y.coefficient(m + 1) for m in range(depth))
    rows = tuple(
        ExpansionRow((m,), derivative[m], derivative[m] * (field.one / field.convert(m)))
        for m in range(1, depth)
    )
    return XExpansion(0, 1, depth, field, rows, derivative, log_z)


def _unstable_two(field: Field, w: LaurentSeries, depth: int) -> XExpansion:
    """F⁰₂ = log((w(u₁) − w(u₂))/(w₁·(u₁ − u₂))) up to one-variable terms."""
    R, u1, u2 = poly_ring("u1,u2", field.domain)
    top = depth - 1

    def truncate(p):
        terms = {m: c for m, c in p.items() if sum(m) <= top}
        return R.from_dict(terms) if terms else R.zero

    w1 = w.coefficient(1)
    quotient = R.zero
    for j in range(1, depth + 1):
        c = w.coefficient(j)
        if c:
            h = sum((u1**a * u2 ** (j - 1 - a) for a in range(j)), R.zero)
            quotient += h * (c * (field.one / w1))
    p = truncate(quotient - R.one)
    log_q, power = R.zero, R.one
    for k in range(1, top + 1):
        power = truncate(power * p)
        if not power:
            break
        term = power * (field.one / field.convert(k))
        log_q += term if k % 2 else -term
    rows = []
    for mu in profiles(2, depth):
        m = log_q.get(mu, field.zero)
        rows.append(ExpansionRow(mu, m * field.convert(mu[0] * mu[1]), m))
    return XExpansion(0, 2, depth, field, tuple(rows))


def belyi_table(
    curve: SpectralCurve,
    g: int,
    n: int,
    depth: int,
    engine: Optional[TopologicalRecursion] = None,
) -> XExpansion:
    """M_{g,n}(μ) for Σμ < depth from the invariants of `curve`."""
    engine = engine or TopologicalRecursion(curve)
    return x_expansion(curve, engine.omega(g, n), depth, engine.convention)


@dataclass(frozen=True)
class StationaryRow:
    insertions: Profile
    degree: int
    value: FieldElement


def gw_stationary_table(
    curve: SpectralCurve,
    g: int,
    n: int,
    depth: int,
    engine: Optional[TopologicalRecursion] = None,
) -> List[StationaryRow]:
    """
    ⟨∏τ_{b_i}(ω)⟩_g read off the expansion on the GW(P¹) curve.

    Example:
        (g, n) = (1, 1) gives ⟨τ₀(ω)⟩₁ = −1/24 in degree 0.
    """
    engine = engine or TopologicalRecursion(curve)
    table = belyi_table(curve, g, n, depth, engine)
    field = curve.field
    rows = []
    if (g, n) == (0, 1):
        for b in range(0, depth - 1):
            if b % 2:
                continue
            value = -table.derivative[b + 1] * (field.one / field.convert(math.factorial(b + 1)))
            rows.append(StationaryRow((b,), (b + 2) // 2, value))
        return rows
    sign = 1 if n % 2 == 0 else -1
    for row in table.rows:
        b = tuple(m - 1 for m in row.mu)
        twice_degree = sum(b) - 2 * g + 2
        if twice_degree < 0 or twice_degree % 2:
            continue
        weight = math.prod(math.factorial(bi + 1) for bi in b)
        value = row.m * field.convert(math.prod(row.mu) * sign) * (field.one / field.convert(weight))
        rows.append(StationaryRow(b, twice_degree // 2, value))
    return rows
