"""
Oracle registry

Named oracles for the `oracle NAME ARGS` subcommand and the tool server.
Each handler takes converted arguments and returns a `Report`.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from . import gromov_witten as gw
from . import oracles
from .errors import GuardError
from .oracles import QQ_FIELD
from .report import Report, make_table, with_source
from .wkb import ResidualLedger

logger = logging.getLogger(__name__)


class OracleSpec(BaseModel):
    """Specification of one named oracle."""

    name: str
    summary: str = ""
    category: str = ""
    arguments: List[str] = []


def _fmt(value) -> str:
    return QQ_FIELD.format(value)


def _laurent_text(laurent) -> str:
    if not laurent:
        return "0"
    return " + ".join(f"({_fmt(c)})*hbar^{p}" for p, c in sorted(laurent.items()))


def _ledger_report(title: str, ledger: ResidualLedger) -> Report:
    table = with_source(make_table(ledger.rows(), ["order", "residual"]), "identity")
    return Report(title, table, ledger.is_zero)


# handlers ---------------------------------------------------------------------


def _dessins(e: int) -> Report:
    rows = [oracles.dessin_count(v, e).row() for v in range(1, 2 * e + 1)]
    passed = all(row["f_disconnected"] == row["closed_form"] for row in rows)
    table = with_source(make_table(rows), "formula")
    return Report(f"dessins with {e} edges", table, passed)


def _connected(e: int) -> Report:
    series = oracles.connected_series(e)
    rows = []
    for v in range(1, 2 * e + 1):
        transitive = oracles.connected_dessin_count(v, e)
        graded = series.get((v, e), QQ_FIELD.zero)
        belyi = oracles.connected_from_belyi(v, e)
        rows.append(
            {
                "v": str(v),
                "transitive_pairs": _fmt(transitive),
                "graded_log": _fmt(graded),
                "from_belyi": _fmt(belyi),
            }
        )
    passed = all(r["transitive_pairs"] == r["graded_log"] == r["from_belyi"] for r in rows)
    return Report(f"connected dessins with {e} edges", with_source(make_table(rows), "oracle"), passed)


def _belyi(g: int, mu: Tuple[int, ...]) -> Report:
    value = oracles.belyi_count(g, mu)
    row = {"g": str(g), "mu": ",".join(map(str, mu)), "M": _fmt(value)}
    return Report("Belyi count", with_source(make_table([row]), "oracle"))


def _catalan(n_max: int) -> Report:
    rows = [{"n": str(n), "C_n": _fmt(oracles.catalan(n))} for n in range(n_max + 1)]
    return Report("Catalan numbers", with_source(make_table(rows), "formula"))


def _stirling(n: int) -> Report:
    rows = [{"n": str(n), "k": str(k), "stirling": str(oracles.stirling_first(n, k))} for k in range(n + 1)]
    return Report("Stirling numbers of the first kind", with_source(make_table(rows), "formula"))


def _bernoulli(m_max: int) -> Report:
    rows = [{"m": str(m), "B_m": _fmt(oracles.bernoulli(m))} for m in range(m_max + 1)]
    return Report("Bernoulli numbers", with_source(make_table(rows), "formula"))


def _hermite(N: int) -> Report:
    scaled = oracles.scaled_hermite(N)
    expectation = oracles.det_expectation(N)
    residual = oracles.hermite_operator_residual(N)
    row = {
        "N": str(N),
        "H_N": oracles.hermite(N).format(),
        "scaled_hermite": scaled.format(),
        "det_expectation": expectation.format(),
        "operator_residual": residual.format(),
    }
    passed = scaled == expectation and residual.is_zero
    return Report("Hermite polynomials", with_source(make_table([row]), "formula"), passed)


def _xbar_closed(e_max: int) -> Report:
    rows = [
        {"x_power": str(-2 * e), "coefficient": _laurent_text(c)}
        for e, c in enumerate(oracles.wave_x_expansion_closed(e_max))
    ]
    return Report("closed-form psi-bar", with_source(make_table(rows), "formula"))


def _xbar_operator(e_max: int) -> Report:
    residuals = oracles.xbar_operator_check(e_max)
    rows = [
        {"x_power": str(-2 * E), "residual": _laurent_text(r)} for E, r in enumerate(residuals, start=1)
    ]
    return Report(
        "conjugated operator on closed-form psi-bar",
        with_source(make_table(rows), "identity"),
        not any(residuals),
    )


def _gw_psi0(K: int) -> Report:
    return Report("degree-zero F_0 of P^1", with_source(make_table(gw.gw_psi0(K).rows()), "formula"))


def _gw_recursion(K: int) -> Report:
    return _ledger_report("degree-zero recursion", gw.degree_zero_recursion_check(K))


def _gw_log(K: int) -> Report:
    return _ledger_report("degree-zero log recursion", gw.gw_log_check(K))


def _gw_eigen(K: int) -> Report:
    return _ledger_report("degree-zero eigenvalue", gw.gw_degree_zero_eigen_check(K))


def _psi_ratio(d: int) -> Report:
    ratio = gw.gw_psi_ratio(d)
    residues = gw.psi_ratio_from_residues(d)
    poles = gw.ratio_poles(ratio)
    row = {
        "d": str(d),
        "r_d": ratio.format(),
        "from_residues": residues.format(),
        "poles": ", ".join(f"{_fmt(p)}^{m}" for p, m in poles),
    }
    passed = ratio == residues and [m for _, m in poles] == [1] * d
    return Report("psi_d/psi_0", with_source(make_table([row]), "identity"), passed)


def _toda(order: int) -> Report:
    return _ledger_report("Toda relation", gw.toda_check(order))


# Format: name => (category, summary, arguments, handler)
ORACLES: Dict[str, Tuple[str, str, Tuple[str, ...], Callable[..., Report]]] = {
    "dessins": ("combinatorial", "Brute-force f(v, e) against Stirling(2e, v)/(2^e e!)", ("e",), _dessins),
    "connected_dessins": (
        "combinatorial",
        "Connected f(v, e) three ways: transitive pairs, graded log, Belyi sums",
        ("e",),
        _connected,
    ),
    "belyi": ("combinatorial", "M_{g,n}(mu) from labelled permutation triples", ("g", "mu"), _belyi),
    "catalan": ("closed-form", "Catalan numbers C_0..C_n", ("n",), _catalan),
    "stirling": ("closed-form", "Unsigned Stirling numbers of the first kind", ("n",), _stirling),
    "bernoulli": ("closed-form", "Bernoulli numbers B_0..B_m", ("m",), _bernoulli),
    "hermite": (
        "closed-form",
        "H_N, the scaled Hermite polynomial, <det(x - A)> and the quantum curve at hbar = 1/N",
        ("N",),
        _hermite,
    ),
    "xbar_closed": ("closed-form", "Closed-form psi-bar coefficients through x^(-2e)", ("e_max",), _xbar_closed),
    "xbar_operator": (
        "closed-form",
        "Conjugated quantum curve applied to the closed-form psi-bar",
        ("e_max",),
        _xbar_operator,
    ),
    "gw_psi0": ("gromov-witten", "Degree-zero F_0 through (hbar/x)^K", ("K",), _gw_psi0),
    "gw_recursion": ("gromov-witten", "psi_0(t - 1) = (1 - (t - 1/2) hbar/x) psi_0(t)", ("K",), _gw_recursion),
    "gw_log": ("gromov-witten", "F_0(t - 1) - F_0(t) = log(1 - (t - 1/2) hbar/x)", ("K",), _gw_log),
    "gw_eigen": ("gromov-witten", "(hbar d/dx + d/dt) psi_0 = (t hbar/x) psi_0", ("K",), _gw_eigen),
    "psi_ratio": ("gromov-witten", "r_d = psi_d/psi_0 two ways, with its poles", ("d",), _psi_ratio),
    "toda": ("gromov-witten", "Toda relation through Q^order", ("order",), _toda),
}

ORACLE_CATEGORIES = ("combinatorial", "closed-form", "gromov-witten")


def get_oracle_spec(name: str) -> OracleSpec:
    """
    Get the specification of an oracle.

    Raises:
        ValueError: If name is not recognized
    """
    if name not in ORACLES:
        raise ValueError(f"Unknown oracle: {name}. Available: {', '.join(ORACLES)}")
    category, summary, arguments, _ = ORACLES[name]
    return OracleSpec(name=name, summary=summary, category=category, arguments=list(arguments))


def list_oracles(category: Optional[str] = None) -> List[OracleSpec]:
    """List oracles, optionally filtered by category."""
    if category is None or category == "all":
        return [get_oracle_spec(name) for name in ORACLES]
    if category not in ORACLE_CATEGORIES:
        raise ValueError(
            f"Unknown category: {category}. Available: {', '.join(ORACLE_CATEGORIES + ('all',))}"
        )
    return [get_oracle_spec(name) for name, entry in ORACLES.items() if entry[0] == category]


def validate_oracle(name: str) -> bool:
    """Check if an oracle name is valid"""
    return name in ORACLES


def _convert(argument: str, text: str):
    try:
        if argument == "mu":
            return tuple(int(p) for p in text.split(",") if p.strip())
        return int(text)
    except ValueError as exc:
        raise GuardError(f"argument {argument} must be an integer, got {text!r}") from exc


def run_oracle(name: str, args: Sequence) -> Report:
    """
    Run an oracle on string (or already typed) arguments.

    Raises:
        ValueError: unknown oracle
        GuardError: wrong number of arguments or out-of-range values
    """
    spec = get_oracle_spec(name)
    if len(args) != len(spec.arguments):
        raise GuardError(
            f"oracle {name} takes {len(spec.arguments)} argument(s) "
            f"({', '.join(spec.arguments)}), got {len(args)}"
        )
    converted = [_convert(a, v) if isinstance(v, str) else v for a, v in zip(spec.arguments, args)]
    logger.info("running oracle %s%s", name, tuple(converted))
    return ORACLES[name][3](*converted)
