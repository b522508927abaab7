"""
Independent oracles

Brute-force permutation counts and closed forms that the engine is checked
against. Permutations are tuples of images on {0, …, m − 1}; products apply
the right factor first.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import ring as poly_ring

from .errors import GuardError
from .field import Field, FieldElement
from .rational import RationalFunction
from .wave import WaveXbarSeries

logger = logging.getLogger(__name__)

MAX_DESSIN_EDGES = 5
MAX_BELYI_DEGREE = 10
MAX_HERMITE = 12

QQ_FIELD = Field()

Laurent = Dict[int, FieldElement]


# closed forms ---------------------------------------------------------------


def catalan(n: int) -> FieldElement:
    """C_n = binom(2n, n)/(n + 1)."""
    if n < 0:
        raise GuardError(f"n must be >= 0, got {n}")
    return QQ(math.comb(2 * n, n), n + 1)


def stirling_first(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind: [x^k] x(x + 1)⋯(x + n − 1)."""
    if n < 0 or not 0 <= k <= n:
        raise GuardError(f"need 0 <= k <= n, got n = {n}, k = {k}")
    return _rising_coefficients(n)[k]


@lru_cache(maxsize=None)
def _rising_coefficients(n: int) -> Tuple[int, ...]:
    coeffs = [1]
    for j in range(n):
        # times (x + j)
        shifted = [0] + coeffs
        scaled = [j * c for c in coeffs] + [0]
        coeffs = [a + b for a, b in zip(shifted, scaled)]
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _bernoulli_table(m: int) -> Tuple[FieldElement, ...]:
    values = [QQ(1)]
    for k in range(1, m + 1):
        total = sum((math.comb(k + 1, j) * values[j] for j in range(k)), QQ(0))
        values.append(-total / (k + 1))
    return tuple(values)


def bernoulli(m: int) -> FieldElement:
    """B_m from Σ_{k ≤ m} binom(m + 1, k)B_k = 0, so B_1 = −1/2."""
    if m < 0:
        raise GuardError(f"m must be >= 0, got {m}")
    return _bernoulli_table(m)[m]


def zeta_negative_odd(g: int) -> FieldElement:
    """ζ(1 − 2g) = −B_{2g}/(2g) for g ≥ 1."""
    if g < 1:
        raise GuardError(f"g must be >= 1, got {g}")
    return -bernoulli(2 * g) / (2 * g)


# permutations ---------------------------------------------------------------


def perm_compose(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    """a∘b."""
    return tuple(a[i] for i in b)


def perm_num_cycles(p: Sequence[int]) -> int:
    seen = [False] * len(p)
    count = 0
    for start in range(len(p)):
        if seen[start]:
            continue
        count += 1
        j = start
        while not seen[j]:
            seen[j] = True
            j = p[j]
    return count


def perms_are_transitive(perms: Sequence[Sequence[int]]) -> bool:
    size = len(perms[0])
    parent = list(range(size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
    root = find(0)
    return all(find(i) == root for i in range(size))


def fixed_point_free_involutions(size: int) -> Iterator[Tuple[int, ...]]:
    """All involutions of cycle type 2^{size/2}."""

    def match(points: List[int], image: List[int]):
        if not points:
            yield tuple(image)
            return
        first = points[0]
        for idx in range(1, len(points)):
            partner = points[idx]
            image[first], image[partner] = partner, first
            yield from match(points[1:idx] + points[idx + 1:], image)

    yield from match(list(range(size)), list(range(size)))


def involutions(size: int) -> Iterator[Tuple[int, Tuple[int, ...]]]:
    """All involutions of S_size with their number of 2-cycles."""

    def build(points: List[int], image: List[int], pairs: int):
        if not points:
            yield pairs, tuple(image)
            return
        first, rest = points[0], points[1:]
        yield from build(rest, image, pairs)
        for idx, partner in enumerate(rest):
            image[first], image[partner] = partner, first
            yield from build(rest[:idx] + rest[idx + 1:], image, pairs + 1)
            image[first], image[partner] = first, partner

    yield from build(list(range(size)), list(range(size)), 0)


def _standard_matching(e: int) -> Tuple[int, ...]:
    image = []
    for i in range(e):
        image.extend([2 * i + 1, 2 * i])
    return tuple(image)


def _cycles_of_type(mu: Sequence[int]) -> Tuple[int, ...]:
    """The permutation with cycles (0 … μ₁−1)(μ₁ … μ₁+μ₂−1)⋯."""
    image = []
    start = 0
    for m in mu:
        image.extend(start + (i + 1) % m for i in range(m))
        start += m
    return tuple(image)


# dessins --------------------------------------------------------------------


@dataclass(frozen=True)
class DessinCount:
    """
    Weighted counts of dessins with v vertices and e edges.

    Attributes:
        disconnected: f•(v, e), brute force over S_{2e}
        connected: f(v, e) from the graded logarithm of the f• series
        closed_form: Stirling(2e, v)/(2^e e!)
    """

    v: int
    e: int
    disconnected: FieldElement
    connected: FieldElement
    closed_form: FieldElement

    def row(self) -> Dict[str, str]:
        fmt = QQ_FIELD.format
        return {
            "v": str(self.v),
            "e": str(self.e),
            "f_disconnected": fmt(self.disconnected),
            "f_connected": fmt(self.connected),
            "closed_form": fmt(self.closed_form),
        }


def _check_edges(e: int) -> None:
    if e < 1 or e > MAX_DESSIN_EDGES:
        raise GuardError(f"e must be between 1 and {MAX_DESSIN_EDGES}, got {e}")


@lru_cache(maxsize=None)
def _dessin_census(e: int) -> Tuple[Dict[int, int], Dict[int, int]]:
    """
    For σ₁ = (0 1)(2 3)⋯ fixed, the number of σ₀ ∈ S_{2e} with v cycles,
    all and with ⟨σ₀, σ₁⟩ transitive.

    Every fixed-point-free involution is conjugate to σ₁, so the pair counts
    are these times (2e)!/(2^e e!).
    """
    sigma1 = _standard_matching(e)
    everything: Dict[int, int] = {}
    transitive: Dict[int, int] = {}
    for sigma0 in itertools.permutations(range(2 * e)):
        v = perm_num_cycles(sigma0)
        everything[v] = everything.get(v, 0) + 1
        if perms_are_transitive((sigma0, sigma1)):
            transitive[v] = transitive.get(v, 0) + 1
    logger.info("dessin census for e = %d over %d permutations", e, math.factorial(2 * e))
    return everything, transitive


def _dessin_weight(e: int) -> FieldElement:
    return QQ(1, 2**e * math.factorial(e))


def disconnected_dessin_count(v: int, e: int) -> FieldElement:
    """f•(v, e) = #{(σ₀, σ₁)}/(2e)!."""
    _check_edges(e)
    everything, _ = _dessin_census(e)
    return everything.get(v, 0) * _dessin_weight(e)


def connected_dessin_count(v: int, e: int) -> FieldElement:
    """f(v, e) from pairs generating a transitive group."""
    _check_edges(e)
    _, transitive = _dessin_census(e)
    return transitive.get(v, 0) * _dessin_weight(e)


def connected_series(e_max: int) -> Dict[Tuple[int, int], FieldElement]:
    """
    f(v, e) for e ≤ e_max from log(1 + Σ f•(v, e) s^v t^e).

    Labelled pairs on 2e points satisfy the exponential formula with the
    (2e)! normalisation absorbed into f•.
    """
    _check_edges(e_max)
    R, s, t = poly_ring("s,t", QQ)

    def truncate(p):
        return R({m: c for m, c in p.items() if m[1] <= e_max})

    A = R.zero
    for e in range(1, e_max + 1):
        for v in range(1, 2 * e + 1):
            A += s**v * t**e * disconnected_dessin_count(v, e)
    log, power = R.zero, R.one
    for k in range(1, e_max + 1):
        power = truncate(power * A)
        log += power * QQ((-1) ** (k + 1), k)
    return {(v, e): c for (v, e), c in log.items() if c}


def dessin_count(v: int, e: int) -> DessinCount:
    """Brute-force f•(v, e) with its connected part and the closed form."""
    _check_edges(e)
    connected = connected_series(e).get((v, e), QQ(0))
    closed = QQ(stirling_first(2 * e, v)) * _dessin_weight(e) if 0 <= v <= 2 * e else QQ(0)
    return DessinCount(v, e, disconnected_dessin_count(v, e), connected, closed)


# Belyi counts ---------------------------------------------------------------


def _check_profile(mu: Sequence[int]) -> int:
    if not mu or any(m < 1 for m in mu):
        raise GuardError(f"profile entries must be positive, got {tuple(mu)}")
    degree = sum(mu)
    if degree > MAX_BELYI_DEGREE:
        raise GuardError(f"profile sum must be <= {MAX_BELYI_DEGREE}, got {degree}")
    return degree


def belyi_count(g: int, mu: Sequence[int]) -> FieldElement:
    """
    M_{g,n}(μ): labelled transitive triples σ₀σ₁σ₂ = 1 over (2e)!.

    σ₁ has cycle type 2^e and σ₂ has labelled cycles of lengths μ. Fixing σ₂
    leaves (2e)!/∏μᵢ conjugates, so M = #{σ₁ : transitive, genus g}/∏μᵢ with
    genus read from v − e + n = 2 − 2g.
    """
    degree = _check_profile(mu)
    if g < 0:
        raise GuardError(f"g must be >= 0, got {g}")
    if degree % 2:
        return QQ(0)
    e, n = degree // 2, len(mu)
    sigma2 = _cycles_of_type(mu)
    count = 0
    for sigma1 in fixed_point_free_involutions(degree):
        if not perms_are_transitive((sigma1, sigma2)):
            continue
        v = perm_num_cycles(perm_compose(sigma1, sigma2))
        if v - e + n == 2 - 2 * g:
            count += 1
    return QQ(count, math.prod(mu))


def compositions(total: int) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of positive integers with the given sum."""
    for cuts in range(total):
        for positions in itertools.combinations(range(1, total), cuts):
            bounds = (0,) + positions + (total,)
            yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def connected_from_belyi(v: int, e: int) -> FieldElement:
    """Σ_n (1/n!) Σ_{|μ| = 2e} M_{g,n}(μ) with 2 − 2g = v − e + n."""
    _check_edges(e)
    total = QQ(0)
    for mu in compositions(2 * e):
        chi = v - e + len(mu)
        if chi > 2 or chi % 2:
            continue
        total += belyi_count((2 - chi) // 2, mu) / math.factorial(len(mu))
    return total


# Hermite polynomials and the Gaussian ensemble ------------------------------


def _double_factorial(m: int) -> int:
    return math.prod(range(m, 0, -2)) if m > 0 else 1


def _check_hermite(N: int) -> None:
    if N < 0 or N > MAX_HERMITE:
        raise GuardError(f"N must be between 0 and {MAX_HERMITE}, got {N}")


def hermite(N: int) -> RationalFunction:
    """H_N = Σ_k (−1)^k binom(N, 2k)(2k − 1)!! 2^{N−k} x^{N−2k}."""
    _check_hermite(N)
    coeffs = [0] * (N + 1)
    for k in range(N // 2 + 1):
        coeffs[N - 2 * k] = (-1) ** k * math.comb(N, 2 * k) * _double_factorial(2 * k - 1) * 2 ** (N - k)
    return RationalFunction.from_coefficients(QQ_FIELD, coeffs, "x")


def scaled_hermite(N: int) -> RationalFunction:
    """(2N)^{−N/2}H_N(x√(N/2)), monic with coefficients in ℚ."""
    _check_hermite(N)
    coeffs = [QQ(0)] * (N + 1)
    for k in range(N // 2 + 1):
        coeffs[N - 2 * k] = QQ(
            (-1) ** k * math.comb(N, 2 * k) * _double_factorial(2 * k - 1), max(N, 1) ** k
        )
    return RationalFunction.from_coefficients(QQ_FIELD, coeffs, "x")


def det_expectation(N: int) -> RationalFunction:
    """
    ⟨det(x − A)⟩ over the Gaussian ensemble with ⟨A_ij A_kl⟩ = δ_il δ_jk/N.

    Only permutations with cycles of length ≤ 2 survive the Wick expansion;
    each 2-cycle contributes −1/N.
    """
    _check_hermite(N)
    counts: Dict[int, int] = {}
    for pairs, _ in involutions(N):
        counts[pairs] = counts.get(pairs, 0) + 1
    coeffs = [QQ(0)] * (N + 1)
    for k, c in counts.items():
        coeffs[N - 2 * k] = QQ((-1) ** k * c, N**k)
    return RationalFunction.from_coefficients(QQ_FIELD, coeffs, "x")


def hermite_operator_residual(N: int) -> RationalFunction:
    """[(N⁻¹d/dx)² − xN⁻¹d/dx + 1] applied to the scaled Hermite polynomial."""
    _check_hermite(N)
    if N < 1:
        raise GuardError("N must be >= 1 for hbar = 1/N")
    H = scaled_hermite(N)
    x = RationalFunction.variable(QQ_FIELD, "x")
    hbar = QQ(1, N)
    return H.diff().diff() * hbar**2 - x * H.diff() * hbar + H


@dataclass(frozen=True)
class HermiteCheck:
    N: int
    wave: RationalFunction
    hermite: RationalFunction
    operator_residual: RationalFunction

    @property
    def holds(self) -> bool:
        return self.wave == self.hermite and self.operator_residual.is_zero

    def row(self) -> Dict[str, str]:
        return {
            "N": str(self.N),
            "psi_at_hbar_1_over_N": self.wave.format(),
            "scaled_hermite": self.hermite.format(),
            "operator_residual": self.operator_residual.format(),
        }


def hermite_wave_check(N: int, xbar: WaveXbarSeries) -> HermiteCheck:
    """
    ψ(x, ħ = 1/N) = x^N ψ̄(x, 1/N) from the engine's ψ̄, against the scaled H_N.

    `xbar` must reach x^{−2e} with 2e > N so the first vanishing coefficient
    is also checked.
    """
    _check_hermite(N)
    if N < 1:
        raise GuardError("N must be >= 1 for hbar = 1/N")
    if 2 * xbar.e_max <= N:
        raise GuardError(f"psi-bar through x^-{2 * xbar.e_max} cannot test N = {N}")
    x = RationalFunction.variable(QQ_FIELD, "x")
    wave = RationalFunction.constant(QQ_FIELD, 0, "x")
    for e in range(xbar.e_max + 1):
        value = QQ(0)
        for p, c in xbar.laurent(e).items():
            value += c * (QQ(1, N) ** p if p >= 0 else QQ(N) ** (-p))
        if value:
            wave = wave + x ** (N - 2 * e) * value
    return HermiteCheck(N, wave, scaled_hermite(N), hermite_operator_residual(N))


# closed-form ψ̄ --------------------------------------------------------------


def _laurent_mul(a: Laurent, b: Laurent) -> Laurent:
    out: Laurent = {}
    for p, c in a.items():
        for q, d in b.items():
            out[p + q] = out.get(p + q, QQ(0)) + c * d
    return {k: v for k, v in out.items() if v}


def _laurent_add(a: Laurent, b: Laurent) -> Laurent:
    out = dict(a)
    for p, c in b.items():
        out[p] = out.get(p, QQ(0)) + c
    return {k: v for k, v in out.items() if v}


def wave_x_expansion_closed(e_max: int) -> List[Laurent]:
    """
    Coefficients of x^{−2e}, e = 0..e_max, of ψ̄ as Laurent polynomials in ħ:
    (−1)^e ħ^e/(2^e e!)·∏_{j=0}^{2e−1}(ħ⁻¹ − j).
    """
    if e_max < 1:
        raise GuardError(f"e_max must be >= 1, got {e_max}")
    rows: List[Laurent] = [{0: QQ(1)}]
    for e in range(1, e_max + 1):
        product: Laurent = {0: QQ(1)}
        for j in range(2 * e):
            product = _laurent_mul(product, {-1: QQ(1), 0: QQ(-j)} if j else {-1: QQ(1)})
        scale = QQ((-1) ** e, 2**e * math.factorial(e))
        rows.append({p + e: c * scale for p, c in product.items()})
    return rows


def xbar_operator_check(e_max: int) -> List[Laurent]:
    """
    Residuals of ħ²∂² + ħ((2/x − x)∂ − 1/x²) + 1/x² on the closed-form ψ̄,
    one Laurent polynomial in ħ per power x^{−2E}, E = 1..e_max.
    """
    rows = wave_x_expansion_closed(e_max)
    residuals = []
    for E in range(1, e_max + 1):
        a = 2 * E - 2
        # coefficient of c_{E−1}: ħ²a(a+1) − 2aħ + 1 − ħ
        weight = {2: QQ(a * (a + 1)), 1: QQ(-2 * a - 1), 0: QQ(1)}
        term = _laurent_mul(weight, rows[E - 1])
        term = _laurent_add(term, _laurent_mul({1: QQ(2 * E)}, rows[E]))
        residuals.append(term)
    return residuals


def closed_from_dessins(e: int) -> Laurent:
    """Σ_v (−1)^{e−v} f•(v, e) ħ^{e−v}."""
    _check_edges(e)
    return {
        e - v: QQ((-1) ** ((e - v) % 2)) * disconnected_dessin_count(v, e)
        for v in range(1, 2 * e + 1)
        if disconnected_dessin_count(v, e)
    }
