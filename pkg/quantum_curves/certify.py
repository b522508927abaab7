"""
Certification suite

Eleven exact checks tying the recursion, the wave function, the WKB solver
and the oracles together. Each criterion returns its residual text and the
source of its expected value, or raises `CheckFailure`.
"""

import logging
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import sympy

from . import gromov_witten as gw
from . import oracles
from .curve import SpectralCurve, load_curve
from .errors import CheckFailure, QuantumCurveError
from .expansion import belyi_table, x_expansion
from .identities import (
    airy_scaling_check,
    check_dilaton,
    check_string,
    invariance_residuals,
    shift_curve,
    stable_pairs,
)
from .operators import load_operator
from .rational import RationalFunction
from .recursion import TopologicalRecursion
from .report import Report, make_table
from .wave import WaveXbarSeries, s_coefficient, wave_expansion, wave_xbar_series
from .wkb import difference_wkb_check, verify_quantum_curve, wkb_solve

logger = logging.getLogger(__name__)

COLUMNS = ["criterion", "description", "status", "residual", "expected_source"]

BELYI_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 1))


@dataclass
class CertificationContext:
    """Curves and engines shared between criteria."""

    curve: SpectralCurve
    chi_max: int = 4

    @cached_property
    def engine(self) -> TopologicalRecursion:
        return TopologicalRecursion(self.curve)

    @cached_property
    def gw_curve(self) -> SpectralCurve:
        return load_curve("gw")

    @cached_property
    def gw_engine(self) -> TopologicalRecursion:
        return TopologicalRecursion(self.gw_curve)

    @cached_property
    def xbar(self) -> WaveXbarSeries:
        return wave_xbar_series(self.curve, 4, self.engine)

    def rational(self, expr) -> RationalFunction:
        return RationalFunction.from_sympy(expr, self.curve.field, self.curve.parameter)


def _compare(label: str, got, expected, fmt) -> None:
    if got != expected:
        raise CheckFailure(f"{label} differs", f"{fmt(got)} != {fmt(expected)}")


# criteria -----------------------------------------------------------------------


def catalan_expansion(ctx: CertificationContext) -> Tuple[str, str]:
    table = x_expansion(ctx.curve, ctx.engine.omega(0, 1), 21)
    fmt = ctx.curve.field.format
    for k in range(11):
        expected = ctx.curve.field.convert(oracles.catalan(k))
        _compare(f"coefficient of x^-{2 * k + 1}", table.derivative[2 * k], expected, fmt)
    return "0", "formula"


def first_correction(ctx: CertificationContext) -> Tuple[str, str]:
    z = sympy.Symbol(ctx.curve.parameter)
    system = wkb_solve(load_operator("catalan"), ctx.curve, 1)
    got = system.derivatives[1].as_rational()
    expected = ctx.rational(-z / (z**2 - 1) ** 2)
    residual = got - expected
    if not residual.is_zero:
        raise CheckFailure("dS_1/dx differs from -y^3/(y^2 - 1)^2", residual.format())
    return "0", "formula"


def quantum_curve(ctx: CertificationContext) -> Tuple[str, str]:
    wave = wave_expansion(ctx.curve, 4, ctx.engine)
    verify_quantum_curve(load_operator("catalan"), wave).require_zero()
    return "0", "identity"


def closed_wave(ctx: CertificationContext) -> Tuple[str, str]:
    closed = oracles.wave_x_expansion_closed(4)
    for e in range(5):
        got = ctx.xbar.laurent(e)
        expected = {p: ctx.curve.field.convert(c) for p, c in closed[e].items()}
        _compare(f"psi-bar coefficient of x^-{2 * e}", got, expected, str)
    return "0", "formula"


def dessin_oracle(ctx: CertificationContext) -> Tuple[str, str]:
    for e in range(1, 5):
        for v in range(1, 2 * e + 1):
            count = oracles.dessin_count(v, e)
            _compare(f"f({v}, {e})", count.disconnected, count.closed_form, oracles.QQ_FIELD.format)
    return "0", "oracle"


def belyi_cross_check(ctx: CertificationContext) -> Tuple[str, str]:
    field_ = ctx.curve.field
    for g, n in BELYI_PAIRS:
        table = belyi_table(ctx.curve, g, n, 9, ctx.engine)
        for row in table.rows:
            expected = field_.convert(oracles.belyi_count(g, row.mu))
            _compare(f"M_{g},{n}{row.mu}", row.m, expected, field_.format)
    return "0", "oracle"


def hermite_identity(ctx: CertificationContext) -> Tuple[str, str]:
    for N in range(1, 7):
        check = oracles.hermite_wave_check(N, ctx.xbar)
        if not check.holds:
            raise CheckFailure(f"Hermite identity fails at N = {N}", str(check.row()))
    return "0", "formula"


def string_dilaton(ctx: CertificationContext) -> Tuple[str, str]:
    for g, n in stable_pairs(ctx.chi_max):
        for m in (0, 1):
            check_string(ctx.curve, g, n, m, ctx.engine).require_zero()
        check_dilaton(ctx.curve, g, n, ctx.engine).require_zero()
    return "0", "identity"


def airy_model(ctx: CertificationContext) -> Tuple[str, str]:
    for g in (1, 2):
        airy_scaling_check(ctx.curve, g, 1, ctx.engine).require_zero()
    return "0", "identity"


def gw_difference_curve(ctx: CertificationContext) -> Tuple[str, str]:
    difference_wkb_check(load_operator("gw"), ctx.gw_curve, 3, engine=ctx.gw_engine).require_zero()
    w = sympy.Symbol("w")
    half = sympy.Rational(1, 2)
    expected = {
        1: 1 + 1 / (w - half),
        2: half + half / (w - half) + half / (w - 3 * half),
    }
    for d, expr in expected.items():
        target = RationalFunction.from_sympy(expr, oracles.QQ_FIELD, "w")
        _compare(f"r_{d}", gw.gw_psi_ratio(d), target, lambda r: r.format())
        _compare(f"r_{d} from residues", gw.psi_ratio_from_residues(d), target, lambda r: r.format())
    gw.degree_zero_recursion_check(6).require_zero()
    return "0", "identity"


def invariance(ctx: CertificationContext) -> Tuple[str, str]:
    x = sympy.Symbol(ctx.curve.parameter)
    g = ctx.rational(x**2 / 2)
    for residual in invariance_residuals(ctx.curve, g, 2, ctx.engine):
        residual.require_zero()
    shifted = shift_curve(ctx.curve, g)
    shifted_engine = TopologicalRecursion(shifted)
    for k in (2, 3):
        before = s_coefficient(ctx.curve, k, ctx.engine)
        after = s_coefficient(shifted, k, shifted_engine)
        if after != before:
            raise CheckFailure(f"S_{k} changed under y -> y + x", (after - before).format())
    return "0", "identity"


# number => (description, check)
CRITERIA: Dict[int, Tuple[str, Callable[[CertificationContext], Tuple[str, str]]]] = {
    1: ("Catalan numbers from dF^0_1/dx", catalan_expansion),
    2: ("first WKB correction of the Catalan operator", first_correction),
    3: ("Catalan quantum curve through hbar^4", quantum_curve),
    4: ("closed-form psi-bar through x^-8", closed_wave),
    5: ("dessin counts equal Stirling numbers, e <= 4", dessin_oracle),
    6: ("x-expansions equal brute-force Belyi counts", belyi_cross_check),
    7: ("Hermite polynomials at hbar = 1/N, N <= 6", hermite_identity),
    8: ("string and dilaton equations", string_dilaton),
    9: ("Airy local model at the branch points", airy_model),
    10: ("GW(P^1) difference curve, ratios and degree zero", gw_difference_curve),
    11: ("invariance under y -> y + x", invariance),
}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    description: str
    passed: bool
    residual: str
    expected_source: str
    seconds: float

    def row(self) -> Dict[str, str]:
        return {
            "criterion": str(self.number),
            "description": self.description,
            "status": "pass" if self.passed else "FAIL",
            "residual": self.residual,
            "expected_source": self.expected_source,
        }


def run_criterion(number: int, ctx: CertificationContext) -> CriterionResult:
    description, check = CRITERIA[number]
    start = time.perf_counter()
    try:
        residual, source = check(ctx)
        passed = True
    except CheckFailure as exc:
        residual = exc.residual or str(exc)
        source = "identity"
        passed = False
    seconds = time.perf_counter() - start
    logger.info("criterion %d (%s): %s in %.1fs", number, description, "pass" if passed else "FAIL", seconds)
    return CriterionResult(number, description, passed, residual, source, seconds)


def certify(
    curve: Optional[SpectralCurve] = None,
    only: Optional[Iterable[int]] = None,
    chi_max: int = 4,
    timings: bool = False,
) -> Report:
    """
    Run the selected criteria (all by default) on the Catalan-model curve.

    Raises:
        QuantumCurveError: a criterion number outside 1..11
    """
    numbers = sorted(set(only)) if only else sorted(CRITERIA)
    unknown = [n for n in numbers if n not in CRITERIA]
    if unknown:
        raise QuantumCurveError(f"unknown criteria {unknown}; use 1 to 11")
    ctx = CertificationContext(curve or load_curve("catalan"), chi_max)
    results: List[CriterionResult] = [run_criterion(n, ctx) for n in numbers]
    rows = []
    for result in results:
        row = result.row()
        if timings:
            row["seconds"] = f"{result.seconds:.2f}"
        rows.append(row)
    columns = COLUMNS + (["seconds"] if timings else [])
    passed = all(r.passed for r in results)
    return Report(f"certification of {ctx.curve.name}", make_table(rows, columns), passed)
