"""
Command-line interface

    quantum-curves omega G N [--curve FILE] [--convention quantum|displayed]
    quantum-curves expand G N --depth D
    quantum-curves wave --k K [--primitive basepoint --basepoint B] [--t T]
    quantum-curves wkb-check --op FILE --k K [--t T]
    quantum-curves quantize --k K --bounds DX,DY
    quantum-curves oracle NAME [ARGS ...]
    quantum-curves certify [--only 1,3] [--chi-max 4] [--timings]

Exit codes: 0 when every requested check passes, 1 for a nonzero residual,
2 for usage errors, 3 for guard violations.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .certify import certify
from .config import RunConfig
from .curve import SpectralCurve, load_curve
from .errors import CheckFailure, GuardError, QuantumCurveError
from .expansion import belyi_table
from .operators import format_operator, format_polynomial_part, load_operator
from .recursion import CONVENTIONS, TopologicalRecursion
from .registry import run_oracle
from .report import Report, make_table, with_source
from .wave import PRIMITIVES, WaveExpansion, t_shift, wave_expansion
from .wkb import difference_wkb_check, reconstruct_operator, verify_quantum_curve

logger = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def configure_logging(verbosity: int) -> None:
    level = LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)]
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


# commands ---------------------------------------------------------------------


def _curve(config: RunConfig) -> SpectralCurve:
    return load_curve(config.curve, config.extension)


def _engine(config: RunConfig, curve: SpectralCurve) -> TopologicalRecursion:
    return TopologicalRecursion(curve, convention=config.convention)


def _wave(config: RunConfig, curve: SpectralCurve, engine: TopologicalRecursion) -> WaveExpansion:
    field = curve.field
    basepoint = field.parse(config.basepoint) if config.basepoint is not None else None
    wave = wave_expansion(curve, config.k, engine, config.primitive, basepoint)
    if config.t is not None:
        wave = t_shift(wave).at(field.parse(config.t))
    return wave


def run_omega(config: RunConfig) -> Report:
    curve = _curve(config)
    omega = _engine(config, curve).omega(config.g, config.n)
    if omega.closed_form is not None:
        rows = [{"slots": "closed form (dz)", "coefficient": omega.closed_form.format()}]
    elif not omega.is_stable:
        rows = [{"slots": "closed form", "coefficient": "dz1*dz2/(z1 - z2)^2"}]
    else:
        rows = omega.rows()
    title = f"omega^{config.g}_{config.n} of {curve.name} ({config.convention} kernel)"
    return Report(title, make_table(rows, ["slots", "coefficient"]))


def run_expand(config: RunConfig) -> Report:
    curve = _curve(config)
    table = belyi_table(curve, config.g, config.n, config.depth, _engine(config, curve))
    fmt = curve.field.format
    rows: List[Dict[str, str]] = []
    notes = []
    if (config.g, config.n) == (0, 1):
        rows.append({"mu": "0", "W": fmt(table.derivative[0]), "M": ""})
        if table.log_coefficient:
            notes.append(f"log x coefficient: {fmt(table.log_coefficient)}")
    for row in table.rows:
        rows.append({"mu": ",".join(map(str, row.mu)), "W": fmt(row.w), "M": fmt(row.m)})
    title = f"M_{config.g},{config.n} of {curve.name} below depth {config.depth}"
    return Report(title, make_table(rows, ["mu", "W", "M"]), notes=notes)


def run_wave(config: RunConfig) -> Report:
    curve = _curve(config)
    wave = _wave(config, curve, _engine(config, curve))
    notes = [f"{key}: {value}" for key, value in wave.normalisation().items()]
    return Report(f"S_0..S_{config.k} of {curve.name}", make_table(wave.rows(), ["k", "S_k"]), notes=notes)


def run_wkb_check(config: RunConfig) -> Report:
    curve = _curve(config)
    engine = _engine(config, curve)
    op = load_operator(config.operator, curve.field)
    if op.flavour == "difference":
        ledger = difference_wkb_check(op, curve, config.k, config.t, engine)
    else:
        ledger = verify_quantum_curve(op, _wave(config, curve, engine))
    table = with_source(make_table(ledger.rows(), ["order", "residual"]), "identity")
    return Report(ledger.label, table, ledger.is_zero)


def run_quantize(config: RunConfig) -> Report:
    curve = _curve(config)
    wave = _wave(config, curve, _engine(config, curve))
    result = reconstruct_operator(wave, config.bounds, config.k)
    rows = [
        {
            "order": f"hbar^{k}",
            "P_k": format_polynomial_part(result.operator, k),
            "support": str(support),
        }
        for k, support in enumerate(result.supports)
    ]
    notes = [
        f"solution dimension: {result.solution_dimension}",
        format_operator(result.operator).rstrip(),
    ]
    return Report(f"operator reconstructed from {curve.name}", make_table(rows), notes=notes)


def run_oracle_command(config: RunConfig) -> Report:
    return run_oracle(config.oracle, config.oracle_args)


def run_certify(config: RunConfig) -> Report:
    return certify(_curve(config), config.only, config.chi_max, config.timings)


HANDLERS: Dict[str, Callable[[RunConfig], Report]] = {
    "omega": run_omega,
    "expand": run_expand,
    "wave": run_wave,
    "wkb-check": run_wkb_check,
    "quantize": run_quantize,
    "oracle": run_oracle_command,
    "certify": run_certify,
}


# parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--curve", default="catalan", help="curve file or bundled name (default: catalan)")
    common.add_argument("--output", type=Path, help="also write the report here, with a .json sidecar")
    common.add_argument("--convention", choices=sorted(CONVENTIONS), default="quantum")
    common.add_argument("--extension", type=int, help="work over QQ(sqrt(d))")
    common.add_argument("-v", "--verbose", dest="verbosity", action="count", default=0)

    wave_flags = argparse.ArgumentParser(add_help=False)
    wave_flags.add_argument("--k", type=int, default=3, help="highest hbar order")
    wave_flags.add_argument("--primitive", choices=PRIMITIVES, default="principal")
    wave_flags.add_argument("--basepoint", help="exact basepoint for the basepoint primitive")
    wave_flags.add_argument("--t", help="exact shift of the t-family")

    parser = argparse.ArgumentParser(
        prog="quantum-curves",
        description="Exact topological recursion, wave functions and quantum curves",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("omega", parents=[common], help="tensor data of omega^g_n")
    p.add_argument("g", type=int)
    p.add_argument("n", type=int)

    p = sub.add_parser("expand", parents=[common], help="x-expansion table M_{g,n}(mu)")
    p.add_argument("g", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--depth", type=int, default=10, help="profiles with sum(mu) < depth")

    sub.add_parser("wave", parents=[common, wave_flags], help="S_0..S_K")

    p = sub.add_parser("wkb-check", parents=[common, wave_flags], help="residual ledger of an operator")
    p.add_argument("--op", dest="operator", required=True, help="operator file or bundled name")

    p = sub.add_parser("quantize", parents=[common, wave_flags], help="reconstruct the quantum curve")
    p.add_argument("--bounds", default="1,2", help="x- and y-degree bounds 'dx,dy'")

    p = sub.add_parser("oracle", parents=[common], help="run a named oracle")
    p.add_argument("oracle", help="oracle name")
    p.add_argument("oracle_args", nargs="*", metavar="ARGS")

    p = sub.add_parser("certify", parents=[common], help="run the certification criteria")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--chi-max", dest="chi_max", type=int, default=4)
    p.add_argument("--timings", action="store_true", help="add wall-clock seconds per criterion")
    return parser


def _error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    configure_logging(args.verbosity)

    values = {key: value for key, value in vars(args).items() if value is not None}
    try:
        config = RunConfig(**values)
    except ValidationError as exc:
        _error(str(exc))
        return 2
    if config.command in ("omega", "expand") and not config.pair_is_valid:
        parser.print_usage(sys.stderr)
        _error(f"(g, n) = ({config.g}, {config.n}) needs g >= 0, n >= 1 and 2g - 2 + n >= -1")
        return 2

    try:
        config.check_guards()
        report = HANDLERS[config.command](config)
    except GuardError as exc:
        _error(str(exc))
        return 3
    except CheckFailure as exc:
        _error(str(exc))
        if exc.residual is not None:
            print(f"residual: {exc.residual}")
        return 1
    except QuantumCurveError as exc:
        _error(str(exc))
        return 1
    except ValueError as exc:
        # unknown oracle names
        _error(str(exc))
        return 2

    sys.stdout.write(report.write(config.output))
    if not report.passed:
        logger.warning("%s: check failed", report.title)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
