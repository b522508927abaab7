"""
Quantum curves MCP server

Model Context Protocol server exposing the recursion engine, wave assembly,
quantum-curve checks and oracles as tools.
"""

import argparse
import asyncio
import json
import logging
from pathlib import Path
from typing import Any, Optional, Sequence

import mcp.server.stdio
import pandas as pd
from mcp.server import Server
from mcp.types import TextContent, Tool

from .cli import run_certify, run_expand, run_omega, run_wave, run_wkb_check
from .config import RunConfig
from .registry import ORACLE_CATEGORIES, get_oracle_spec, list_oracles, run_oracle
from .report import Report, df_to_json_string

logger = logging.getLogger(__name__)

# Initialize server
app = Server("quantum-curves")

# Directory for relative curve and operator files (set by --curves-dir)
_curves_dir: Optional[Path] = None

CURVE_PROPERTY = {
    "type": "string",
    "description": "Curve file path or bundled name ('catalan', 'airy', 'gw')",
    "default": "catalan",
}


def _pair_properties() -> dict:
    return {
        "curve": CURVE_PROPERTY,
        "g": {"type": "integer", "description": "Genus g >= 0"},
        "n": {"type": "integer", "description": "Number of points n >= 1 with 2g - 2 + n >= -1"},
    }


@app.list_tools()
async def list_tools() -> list[Tool]:
    """List available MCP tools."""
    return [
        Tool(
            name="list_oracles",
            description="""List the named oracles with their arguments.

Parameters:
- category: "combinatorial" (dessins, Belyi counts), "closed-form"
  (Catalan, Stirling, Bernoulli, Hermite, closed-form psi-bar),
  "gromov-witten" (degree-zero wave, psi ratios, Toda) or "all"
""",
            inputSchema={
                "type": "object",
                "properties": {
                    "category": {
                        "type": "string",
                        "description": "Filter by category",
                        "enum": ["all", *ORACLE_CATEGORIES],
                        "default": "all",
                    },
                },
            },
        ),
        Tool(
            name="get_oracle_info",
            description="Get the summary, category and argument names of one oracle.",
            inputSchema={
                "type": "object",
                "properties": {"name": {"type": "string", "description": "Oracle name"}},
                "required": ["name"],
            },
        ),
        Tool(
            name="run_oracle",
            description="""Run a named oracle.

Examples:
- run_oracle("dessins", ["3"]): f(v, 3) by brute force against Stirling numbers
- run_oracle("belyi", ["0", "2,2"]): M_{0,2}(2, 2)
- run_oracle("psi_ratio", ["2"]): psi_2/psi_0 for GW(P^1)
""",
            inputSchema={
                "type": "object",
                "properties": {
                    "name": {"type": "string", "description": "Oracle name"},
                    "args": {
                        "type": "array",
                        "items": {"type": "string"},
                        "description": "Arguments in the order listed by get_oracle_info",
                    },
                },
                "required": ["name"],
            },
        ),
        Tool(
            name="compute_omega",
            description="""Exact tensor data of omega^g_n on a rational spectral curve.

Each row is a multiset of (branch point : k) slots, meaning
prod (z_i - alpha)^(-k-1) dz_i, with its exact coefficient.
""",
            inputSchema={
                "type": "object",
                "properties": {
                    **_pair_properties(),
                    "convention": {
                        "type": "string",
                        "enum": ["quantum", "displayed"],
                        "default": "quantum",
                    },
                },
                "required": ["g", "n"],
            },
        ),
        Tool(
            name="expand_omega",
            description="Expansion of omega^g_n at x = infinity: W and the Belyi count M for each profile mu.",
            inputSchema={
                "type": "object",
                "properties": {
                    **_pair_properties(),
                    "depth": {"type": "integer", "description": "Profiles with sum(mu) < depth", "default": 10},
                },
                "required": ["g", "n"],
            },
        ),
        Tool(
            name="wave_coefficients",
            description="S_0..S_K of the wave function as exact log-augmented functions of z.",
            inputSchema={
                "type": "object",
                "properties": {
                    "curve": CURVE_PROPERTY,
                    "k": {"type": "integer", "description": "Highest order K <= 8", "default": 3},
                    "t": {"type": "string", "description": "Exact shift of the t-family (optional)"},
                },
            },
        ),
        Tool(
            name="check_quantum_curve",
            description="""Residual ledger of an operator acting on the wave, hbar^0..hbar^K.

All residuals zero means the operator annihilates the wave through hbar^K.
""",
            inputSchema={
                "type": "object",
                "properties": {
                    "curve": CURVE_PROPERTY,
                    "operator": {
                        "type": "string",
                        "description": "Operator file path or bundled name ('catalan', 'gw')",
                    },
                    "k": {"type": "integer", "default": 3},
                    "t": {"type": "string", "description": "Exact t (optional)"},
                },
                "required": ["operator"],
            },
        ),
        Tool(
            name="certify",
            description="Run certification criteria 1-11 and report pass/fail with residuals.",
            inputSchema={
                "type": "object",
                "properties": {
                    "only": {"type": "string", "description": "Comma-separated criteria, e.g. '1,3'"},
                    "chi_max": {"type": "integer", "default": 4},
                },
            },
        ),
    ]


def resolve(source: str) -> str:
    """Look a relative curve or operator file up in the configured curves directory."""
    if _curves_dir is None:
        return source
    candidate = _curves_dir / source
    return str(candidate) if candidate.is_file() else source


def _report_content(report: Report) -> list[TextContent]:
    status = "passed" if report.passed else "FAILED"
    return [TextContent(type="text", text=f"{report.title} ({status})\n\n{report.to_json()}")]


@app.call_tool()
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    """
    Handle tool execution.
    """
    arguments = arguments or {}
    try:
        if name == "list_oracles":
            category = arguments.get("category", "all")
            specs = list_oracles(category)
            df = pd.DataFrame([spec.model_dump() for spec in specs])
            return [
                TextContent(
                    type="text",
                    text=f"Found {len(df)} oracles in category '{category}'\n\n{df_to_json_string(df)}",
                )
            ]

        elif name == "get_oracle_info":
            spec = get_oracle_spec(arguments.get("name"))
            return [TextContent(type="text", text=json.dumps(spec.model_dump(), indent=2))]

        elif name == "run_oracle":
            args = [str(a) for a in arguments.get("args", [])]
            return _report_content(run_oracle(arguments.get("name"), args))

        elif name in TOOL_COMMANDS:
            command, handler = TOOL_COMMANDS[name]
            arguments = dict(arguments)
            for key in ("curve", "operator"):
                if key in arguments:
                    arguments[key] = resolve(arguments[key])
            config = RunConfig(command=command, **arguments).check_guards()
            if command in ("omega", "expand") and not config.pair_is_valid:
                return [TextContent(type="text", text=f"Error: (g, n) = ({config.g}, {config.n}) is invalid")]
            return _report_content(handler(config))

        else:
            return [TextContent(type="text", text=f"Unknown tool: {name}")]

    except Exception as e:
        logger.info("tool %s failed: %s", name, e)
        return [TextContent(type="text", text=f"Error: {str(e)}")]


# tool => (command, handler)
TOOL_COMMANDS = {
    "compute_omega": ("omega", run_omega),
    "expand_omega": ("expand", run_expand),
    "wave_coefficients": ("wave", run_wave),
    "check_quantum_curve": ("wkb-check", run_wkb_check),
    "certify": ("certify", run_certify),
}


async def main():
    """Run the MCP server"""
    async with mcp.server.stdio.stdio_server() as (read_stream, write_stream):
        await app.run(
            read_stream,
            write_stream,
            app.create_initialization_options(),
        )


def run(argv: Optional[Sequence[str]] = None) -> None:
    """Parse server flags and run the server."""
    global _curves_dir
    parser = argparse.ArgumentParser(prog="quantum-curves-server")
    parser.add_argument("--curves-dir", type=Path, help="directory for relative curve and operator files")
    args = parser.parse_args(argv)
    _curves_dir = args.curves_dir
    asyncio.run(main())


if __name__ == "__main__":
    run()
