"""
Topological recursion

Stable invariants ω^g_n of a rational spectral curve are stored as finite
sums of products of pole differentials

    ω^g_n = Σ c(K) · Σ_{orderings of K} ⊗ᵢ (zᵢ − α_{bᵢ})^{−kᵢ−1} dzᵢ

keyed by the sorted multiset K = ((b₁,k₁), …, (b_n,k_n)). The recursion is
evaluated one branch point at a time in the local coordinate s = z − α: the
bracket ω(z, σz, …) + Σ' ω(z, …)ω(σz, …) becomes a table of Laurent series in
s indexed by the spectator multiset, and each residue against the kernel is
a finite dot product of coefficients.
"""

import logging
import math
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import sympy
from sympy.utilities.iterables import multiset_permutations

from .curve import BranchData, SpectralCurve, validate_curve
from .errors import CurveError, GuardError, PrecisionError, QuantumCurveError, SymmetryError
from .field import Field, FieldElement
from .logfunc import LogAugmentedFunction
from .rational import RationalFunction
from .series import LaurentSeries, series_expand

logger = logging.getLogger(__name__)

CONVENTIONS = {"quantum": 1, "displayed": -1}

PRECISION_MARGIN = 4


class PoleBasisIndex(NamedTuple):
    """The differential (z − α_branch)^{−k−1} dz, k ≥ 1."""

    branch: int
    k: int


Key = Tuple[PoleBasisIndex, ...]


def pole_bound(g: int, n: int) -> int:
    return 6 * g - 6 + 4 * n


def check_stable(g: int, n: int) -> None:
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise GuardError(f"(g, n) = ({g}, {n}) is not stable: need g >= 0, n >= 1, 2g - 2 + n > 0")


# multisets ---------------------------------------------------------------


def distinct(key: Key) -> List[PoleBasisIndex]:
    return sorted(set(key))


def remove_one(key: Key, v: PoleBasisIndex) -> Key:
    i = key.index(v)
    return key[:i] + key[i + 1:]


def merge(a: Key, b: Key) -> Key:
    return tuple(sorted(a + b))


def ordering_count(key: Key) -> int:
    """Number of distinct orderings of a multiset."""
    count = math.factorial(len(key))
    for m in Counter(key).values():
        count //= math.factorial(m)
    return count


def sub_multiset_count(whole: Key, part: Key) -> int:
    """Number of position subsets of `whole` carrying exactly the multiset `part`."""
    total = Counter(whole)
    count = 1
    for v, m in Counter(part).items():
        count *= math.comb(total[v], m)
    return count


# tensor data -------------------------------------------------------------


@dataclass(frozen=True)
class Multidifferential:
    """
    ω^g_n as exact tensor data.

    For stable (g, n) `coefficients` maps sorted keys to nonzero field
    elements. The unstable (0,1) carries `closed_form` = −y·x′ (the
    coefficient of dz); (0,2) is the Cauchy kernel and carries no data.
    """

    g: int
    n: int
    field: Field
    alphas: Tuple[FieldElement, ...]
    coefficients: Mapping[Key, FieldElement]
    symbol: str = "z"
    closed_form: Optional[LogAugmentedFunction] = None

    @property
    def is_stable(self) -> bool:
        return 2 * self.g - 2 + self.n > 0

    def __len__(self) -> int:
        return len(self.coefficients)

    @property
    def is_zero(self) -> bool:
        return self.is_stable and not self.coefficients

    def items(self) -> Iterator[Tuple[Key, FieldElement]]:
        return iter(sorted(self.coefficients.items()))

    def coefficient(self, *slots) -> FieldElement:
        key = tuple(sorted(PoleBasisIndex(*v) for v in slots))
        return self.coefficients.get(key, self.field.zero)

    def max_pole_order(self) -> int:
        return max((v.k + 1 for key in self.coefficients for v in key), default=0)

    @property
    def residue_free(self) -> bool:
        return all(v.k >= 1 for key in self.coefficients for v in key)

    def full_tensor(self) -> Dict[Tuple[PoleBasisIndex, ...], FieldElement]:
        """Coefficients of every ordered slot assignment."""
        out = {}
        for key, c in self.coefficients.items():
            for ordering in multiset_permutations(list(key)):
                out[tuple(ordering)] = c
        return out

    def scaled(self, c: FieldElement) -> "Multidifferential":
        coefficients = {k: c * v for k, v in self.coefficients.items() if c * v}
        return Multidifferential(self.g, self.n, self.field, self.alphas, coefficients, self.symbol)

    def basis_function(self, v: PoleBasisIndex) -> RationalFunction:
        """(z − α)^{−k−1} for one slot."""
        z = RationalFunction.variable(self.field, self.symbol)
        return (z - self.alphas[v.branch]) ** (-v.k - 1)

    def to_sympy(self, symbols) -> sympy.Expr:
        """The coefficient of dz₁⋯dz_n as an expression in the given symbols."""
        if self.g == 0 and self.n == 2:
            return 1 / (symbols[0] - symbols[1]) ** 2
        if self.closed_form is not None:
            return self.closed_form.to_sympy(symbols[0])
        to = self.field.to_sympy
        expr = sympy.Integer(0)
        for key, c in self.coefficients.items():
            for ordering in multiset_permutations(list(key)):
                term = to(c)
                for sym, v in zip(symbols, ordering):
                    term *= (sym - to(self.alphas[v.branch])) ** (-v.k - 1)
                expr += term
        return expr

    def format_key(self, key: Key) -> str:
        return " ".join(f"[{self.field.format(self.alphas[v.branch])}:{v.k}]" for v in key)

    def rows(self) -> List[Dict[str, str]]:
        """Printable rows (slots, coefficient) in key order."""
        return [
            {"slots": self.format_key(key), "coefficient": self.field.format(c)}
            for key, c in self.items()
        ]


@dataclass(frozen=True)
class KernelSeries:
    """
    Recursion kernel at one branch point.

    K(z₀, α + s) = Σ_j (z₀ − α)^{−j−1}dz₀ · κ_j(s)/ds, with kappas[j − 1] = κ_j.
    """

    branch: int
    alpha: FieldElement
    field: Field
    sign: int
    kappas: Tuple[LaurentSeries, ...]
    order: int

    def coefficient(self, m: int) -> Dict[PoleBasisIndex, FieldElement]:
        """The s^m coefficient as a combination of basis differentials in z₀."""
        out = {}
        for j, kappa in enumerate(self.kappas, start=1):
            c = kappa.coefficient(m)
            if c:
                out[PoleBasisIndex(self.branch, j)] = c
        return out

    @property
    def valuation(self) -> int:
        return min(k.valuation for k in self.kappas if not k.is_zero)


class TopologicalRecursion:
    """
    Memoised ω^g_n for one curve.

    Args:
        curve: the spectral curve
        data: validated branch data (computed when omitted)
        convention: "quantum" (default) or "displayed" kernel sign
        check_symmetry: evaluate every coefficient once per distinct slot
            value and require agreement
    """

    def __init__(
        self,
        curve: SpectralCurve,
        data: Optional[BranchData] = None,
        convention: str = "quantum",
        check_symmetry: bool = True,
    ):
        if convention not in CONVENTIONS:
            raise QuantumCurveError(
                f"unknown kernel convention {convention!r}; use one of {sorted(CONVENTIONS)}"
            )
        self.curve = curve
        self.data = data if data is not None else validate_curve(curve)
        self.convention = convention
        self.sign = CONVENTIONS[convention]
        self.check_symmetry = check_symmetry
        self.field = curve.field
        self.alphas = tuple(self.data.alphas)
        self.pole_bound_violations: List[Tuple[int, int, int]] = []
        self._memo: Dict[Tuple[int, int], Multidifferential] = {}
        self._tables: Dict[tuple, Tuple[int, dict]] = {}
        self._lock = threading.RLock()

    # public ------------------------------------------------------------

    def omega(self, g: int, n: int) -> Multidifferential:
        """ω^g_n; (0,1) and (0,2) come back in closed form."""
        if g < 0 or n < 1 or 2 * g - 2 + n < -1:
            raise GuardError(f"(g, n) = ({g}, {n}) is outside 2g - 2 + n >= -1 with n >= 1")
        with self._lock:
            hit = self._memo.get((g, n))
        if hit is not None:
            return hit
        if (g, n) == (0, 1):
            result = Multidifferential(
                0, 1, self.field, self.alphas, {}, self.curve.parameter,
                closed_form=-(self.curve.y * self.curve.x_prime),
            )
        elif (g, n) == (0, 2):
            result = Multidifferential(0, 2, self.field, self.alphas, {}, self.curve.parameter)
        else:
            result = self._compute(g, n)
        with self._lock:
            return self._memo.setdefault((g, n), result)

    def kernel(self, branch: int, order: int) -> KernelSeries:
        """κ_j for j = 1..order + 2, each through s^order."""
        if order < 0:
            raise GuardError(f"kernel order must be >= 0, got {order}")
        kappas = tuple(self._kappa(branch, j, order).truncate(order) for j in range(1, order + 3))
        return KernelSeries(
            branch, self.alphas[branch], self.field, self.sign, kappas, order
        )

    # local series --------------------------------------------------------

    def _sigma(self, a: int, order: int) -> LaurentSeries:
        return self.data.deck(a, 2 * order + 4)

    def _sigma_prime(self, a: int, order: int) -> LaurentSeries:
        return self.data.cached(
            ("deck'", a), order, lambda: self._sigma(a, order).derivative()
        ).truncate(order)

    def _basis_at(self, a: int, v: PoleBasisIndex, order: int) -> LaurentSeries:
        """(z − α_b)^{−k−1} at z = α_a + s."""
        if v.branch == a:
            return LaurentSeries.monomial(self.field, -v.k - 1, order)

        def build():
            z = RationalFunction.variable(self.field, self.curve.parameter)
            return series_expand((z - self.alphas[v.branch]) ** (-v.k - 1), self.alphas[a], order)

        return self.data.cached(("e", a, v), order, build).truncate(order)

    def _basis_at_sigma(self, a: int, v: PoleBasisIndex, order: int) -> LaurentSeries:
        """(z − α_b)^{−k−1} dz pulled back along z = α_a + σ(s), divided by ds."""

        def build():
            sigma = self._sigma(a, order)
            if v.branch == a:
                value = sigma.pow(-v.k - 1, order)
            else:
                value = self._basis_at(a, v, order).compose(sigma)
            return value.mul(self._sigma_prime(a, order), order)

        return self.data.cached(("e~", a, v), order, build).truncate(order)

    def _cauchy_at(self, a: int, k: int, order: int, side: int) -> LaurentSeries:
        """Coefficient of (z_i − α_a)^{−k−1}dz_i in B(z, z_i)/ds at z = α_a + s or α_a + σ(s)."""
        scale = self.field.convert(k)
        if side == 1:
            return LaurentSeries.monomial(self.field, k - 1, order, scale)

        def build():
            sigma = self._sigma(a, order)
            return sigma.pow(k - 1, order).mul(self._sigma_prime(a, order), order).scale(scale)

        return self.data.cached(("B~", a, k), order, build).truncate(order)

    def _cauchy_diagonal(self, a: int, order: int) -> LaurentSeries:
        """B(z, σz)/ds² = σ′/(s − σ)²."""

        def build():
            sigma = self._sigma(a, order)
            s = LaurentSeries.monomial(self.field, 1, sigma.order)
            gap = (s - sigma).pow(-2, order)
            return gap.mul(self._sigma_prime(a, order), order)

        return self.data.cached(("B(z,σz)", a), order, build).truncate(order)

    def _kernel_denominator(self, a: int, order: int) -> LaurentSeries:
        """1/(2[y(α+s) − y(α+σ(s))]·x′(α+s)) through s^order."""

        def build():
            label = self.data.points[a].label
            sigma = self._sigma(a, order)
            local = self.data.y_local(a, order + 3)
            dy = local.series - local.series.compose(sigma)
            for value, coefficient in local.log_constants:
                if not (coefficient - coefficient.compose(sigma)).is_zero:
                    raise CurveError(
                        f"the constant log({self.field.format(value)}) does not cancel "
                        f"in y(p) - y(p^) at {label}"
                    )
            if dy.is_zero or dy.valuation != 1:
                raise CurveError(f"y(p) - y(p^) vanishes to order >= 2 at {label}")
            product = dy.mul(self.data.x_prime_series(a, order + 3)).scale(2)
            return product.inverse().truncate(order)

        return self.data.cached(("1/2dydx", a), order, build).truncate(order)

    def _kappa(self, a: int, j: int, order: int) -> LaurentSeries:
        """κ_j = ±(s^j − σ^j)/(2Δy·x′) through s^order."""

        def build():
            sigma = self._sigma(a, order)
            numerator = LaurentSeries.monomial(self.field, j, order + 2) - sigma.pow(j, order + 2)
            value = numerator.mul(self._kernel_denominator(a, order), order)
            return value if self.sign > 0 else -value

        return self.data.cached(("kappa", self.sign, a, j), order, build).truncate(order)

    # recursion -----------------------------------------------------------

    def _table(self, a: int, g: int, m: int, order: int, side: int) -> Dict[Key, LaurentSeries]:
        """
        ω^g_m with its first slot at α_a + s (side 1) or α_a + σ(s) (side 2),
        as series indexed by the multiset of the remaining m − 1 slots.
        """
        key = (a, g, m, side)
        with self._lock:
            hit = self._tables.get(key)
            if hit is not None and hit[0] >= order:
                return hit[1]
        table: Dict[Key, LaurentSeries] = {}
        if (g, m) == (0, 2):
            for k in range(1, order + 2):
                table[(PoleBasisIndex(a, k),)] = self._cauchy_at(a, k, order, side)
        else:
            local = self._basis_at if side == 1 else self._basis_at_sigma
            for K, c in self.omega(g, m).items():
                for v in distinct(K):
                    rest = remove_one(K, v)
                    term = local(a, v, order).scale(c)
                    table[rest] = table[rest] + term if rest in table else term
        with self._lock:
            self._tables[key] = (order, table)
        return table

    def _bracket(self, a: int, g: int, n: int, order: int) -> Dict[Key, LaurentSeries]:
        """Spectator-indexed series of the recursion bracket through s⁰, for ω^g_{n+1}."""
        bracket: Dict[Key, LaurentSeries] = {}

        def add(key: Key, series: LaurentSeries) -> None:
            if series.is_zero:
                return
            bracket[key] = bracket[key] + series if key in bracket else series

        if g >= 1:
            if (g - 1, n + 2) == (0, 2):
                add((), self._cauchy_diagonal(a, order))
            else:
                for K, c in self.omega(g - 1, n + 2).items():
                    for v0 in distinct(K):
                        rest = remove_one(K, v0)
                        first = self._basis_at(a, v0, order)
                        for v1 in distinct(rest):
                            second = self._basis_at_sigma(a, v1, order)
                            if first.valuation + second.valuation > 0:
                                continue
                            add(remove_one(rest, v1), first.mul(second, 0).scale(c))

        for g1 in range(g + 1):
            g2 = g - g1
            for i in range(n + 1):
                m1, m2 = i + 1, n - i + 1
                if (g1, m1) == (0, 1) or (g2, m2) == (0, 1):
                    continue
                left = self._table(a, g1, m1, order, 1)
                right = self._table(a, g2, m2, order, 2)
                for T1, s1 in left.items():
                    for T2, s2 in right.items():
                        if s1.valuation + s2.valuation > 0:
                            continue
                        T = merge(T1, T2)
                        factor = sub_multiset_count(T, T1)
                        add(T, s1.mul(s2, 0).scale(self.field.convert(factor)))
        return bracket

    def _compute(self, g: int, n1: int) -> Multidifferential:
        check_stable(g, n1)
        n = n1 - 1
        order = max(pole_bound(g, n1), 2) + PRECISION_MARGIN
        logger.info("computing omega^%d_%d on %s (order %d)", g, n1, self.curve.name, order)
        values: Dict[Key, FieldElement] = {}
        for a, point in enumerate(self.data.points):
            bracket = self._bracket(a, g, n, order)
            logger.debug("omega^%d_%d at %s: %d bracket terms", g, n1, point.label, len(bracket))
            for T, series in bracket.items():
                if series.order < 0:
                    raise PrecisionError(
                        f"bracket for omega^{g}_{n1} at {point.label} known only through "
                        f"s^{series.order}"
                    )
                top = -1 - series.valuation
                for j in range(1, 2 - series.valuation):
                    v = PoleBasisIndex(a, j)
                    if not self.check_symmetry and T and v > T[0]:
                        continue
                    kappa = self._kappa(a, j, max(top, order))
                    if kappa.order < top:
                        raise PrecisionError(
                            f"kernel at {point.label} known only through s^{kappa.order}"
                        )
                    value = self.field.zero
                    for m in range(kappa.valuation, top + 1):
                        c = kappa._get(m)
                        if c:
                            value += c * series._get(-1 - m)
                    key = merge((v,), T)
                    previous = values.get(key)
                    if previous is None:
                        values[key] = value
                    elif previous != value:
                        raise SymmetryError(
                            f"omega^{g}_{n1} coefficient {key} differs between slot choices"
                        )
        coefficients = {k: c for k, c in values.items() if c}
        result = Multidifferential(
            g, n1, self.field, self.alphas, coefficients, self.curve.parameter
        )
        bound = pole_bound(g, n1)
        if result.max_pole_order() > bound:
            logger.warning(
                "omega^%d_%d has a pole of order %d above %d", g, n1, result.max_pole_order(), bound
            )
            self.pole_bound_violations.append((g, n1, result.max_pole_order()))
        logger.info("omega^%d_%d done: %d coefficients", g, n1, len(coefficients))
        return result


def recursion_kernel(
    curve: SpectralCurve, alpha: FieldElement, order: int, convention: str = "quantum"
) -> KernelSeries:
    """Kernel series at the branch point α through s^order."""
    engine = TopologicalRecursion(curve, convention=convention)
    return engine.kernel(engine.data.index_of(alpha), order)


def omega(curve: SpectralCurve, g: int, n: int, convention: str = "quantum") -> Multidifferential:
    """One-shot ω^g_n; keep a TopologicalRecursion around to reuse the memo."""
    return TopologicalRecursion(curve, convention=convention).omega(g, n)
