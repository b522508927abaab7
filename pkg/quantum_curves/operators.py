"""
Normal-ordered operators

P̂ = Σ_k ħ^k P_k(x̂, ŷ) with every x̂ to the left. In the differential
flavour ŷ = ħ d/dx and [x̂, ŷ] = −ħ; in the difference flavour the
y-monomials are shifts e^{jŷ} = e^{jħ d/dx}, j ∈ ℤ, and e^{jŷ}x̂ = (x̂ + jħ)e^{jŷ}.
Each P_k is stored as {(i, j): c} for c·x̂^i ŷ^j (or c·x̂^i e^{jŷ}).

Operator files hold one line per ħ-power:

    # catalan
    const q = 1
    hbar^0 : y^2 - x*y + 1

using the generators x, y for the differential flavour and x, Yp, Ym
(e^{±ħ d/dx}) for the difference flavour.
"""

import logging
import math
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.rings import ring as poly_ring

from .curve import CURVES_DIR
from .errors import QuantumCurveError
from .field import Field, FieldElement
from .parser import evaluate_polynomial, parse_constant
from .rational import RationalFunction

logger = logging.getLogger(__name__)

FLAVOURS = ("differential", "difference")

BUNDLED_OPERATORS: Dict[str, str] = {
    "catalan": "catalan.op",
    "gw": "gw.op",
    "first_order": "first_order.op",
}

Monomial = Tuple[int, int]
Graded = Dict[Tuple[int, int, int], FieldElement]


@dataclass(frozen=True)
class OperatorPolynomial:
    """
    P̂ = Σ_k ħ^k P_k(x̂, ŷ), normal ordered.

    Attributes:
        flavour: "differential" or "difference"
        field: coefficient field
        terms: terms[k] maps (i, j) to the coefficient of x̂^i ŷ^j in P_k
        constants: named constants substituted at parse time, kept for printing
        name: label used in reports
    """

    flavour: str
    field: Field
    terms: Tuple[Mapping[Monomial, FieldElement], ...]
    constants: Mapping[str, str] = dataclass_field(default_factory=dict)
    name: str = "operator"

    def __post_init__(self):
        if self.flavour not in FLAVOURS:
            raise QuantumCurveError(f"unknown operator flavour {self.flavour!r}")
        if not self.terms or not any(self.terms[0].values()):
            raise QuantumCurveError("the hbar^0 part of an operator must be nonzero")
        if self.flavour == "differential" and any(j < 0 for P in self.terms for _, j in P):
            raise QuantumCurveError("negative powers of y need the difference flavour")

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    def term(self, k: int) -> Mapping[Monomial, FieldElement]:
        return self.terms[k] if 0 <= k < len(self.terms) else {}

    def graded(self) -> Graded:
        return {(k, i, j): c for k, P in enumerate(self.terms) for (i, j), c in P.items() if c}

    @classmethod
    def from_graded(
        cls,
        flavour: str,
        field: Field,
        graded: Mapping[Tuple[int, int, int], FieldElement],
        constants: Optional[Mapping[str, str]] = None,
        name: str = "operator",
    ) -> "OperatorPolynomial":
        top = max((k for (k, _, _), c in graded.items() if c), default=0)
        terms: List[Dict[Monomial, FieldElement]] = [dict() for _ in range(top + 1)]
        for (k, i, j), c in graded.items():
            if c:
                terms[k][(i, j)] = c
        return cls(flavour, field, tuple(terms), dict(constants or {}), name)

    def y_degree(self) -> int:
        return max((abs(j) for P in self.terms for _, j in P), default=0)

    def x_degree(self) -> int:
        return max((i for P in self.terms for i, _ in P), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return (
            self.flavour == other.flavour
            and self.field == other.field
            and self.graded() == other.graded()
        )

    def __hash__(self) -> int:
        return hash((self.flavour, self.field, tuple(sorted(self.graded().items()))))


def semiclassical_limit(op: OperatorPolynomial):
    """
    P_0 with x̂ ↦ x and ŷ ↦ y, as a sparse polynomial.

    The difference flavour uses the ring (x, Yp, Ym) with Yp = e^y and
    Ym = e^{−y}.

    Returns:
        (ring, polynomial)
    """
    if op.flavour == "differential":
        R, x, y = poly_ring("x,y", op.field.domain)
        poly = R.zero
        for (i, j), c in op.term(0).items():
            poly += x**i * y**j * c
        return R, poly
    R, x, yp, ym = poly_ring("x,Yp,Ym", op.field.domain)
    poly = R.zero
    for (i, j), c in op.term(0).items():
        poly += x**i * (yp**j if j >= 0 else ym ** (-j)) * c
    return R, poly


def derivative_in_y(op: OperatorPolynomial) -> Dict[Monomial, FieldElement]:
    """∂P_0/∂y as {(i, j): c}; for the difference flavour ∂/∂y of e^{jy} is j e^{jy}."""
    out: Dict[Monomial, FieldElement] = {}
    for (i, j), c in op.term(0).items():
        if j == 0:
            continue
        key = (i, j - 1) if op.flavour == "differential" else (i, j)
        out[key] = out.get(key, op.field.zero) + c * op.field.convert(j)
    return {k: c for k, c in out.items() if c}


# parsing and printing ------------------------------------------------------


def parse_operator_file(
    text: str, field: Optional[Field] = None, name: str = "operator"
) -> OperatorPolynomial:
    """
    Read `hbar^k : <polynomial>` lines; the flavour follows from the generators.

    Raises:
        QuantumCurveError: malformed line, repeated ħ-power, missing hbar^0,
            or x, y mixed with Yp, Ym
        ExpressionSyntaxError: malformed polynomial
    """
    field = field or Field()
    constants: Dict[str, FieldElement] = {}
    printed: Dict[str, str] = {}
    lines: Dict[int, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("const "):
            key, sep, value = line[len("const "):].partition("=")
            key = key.strip()
            if not sep or not key.isidentifier():
                raise QuantumCurveError(f"line {number}: expected 'const name = value'")
            constants[key] = parse_constant(value, field, constants)
            printed[key] = value.strip()
            continue
        head, sep, body = line.partition(":")
        head = head.replace(" ", "")
        if not sep or not head.startswith("hbar"):
            raise QuantumCurveError(f"line {number}: expected 'hbar^k : polynomial', got {raw.strip()!r}")
        power = head[len("hbar"):]
        if power == "":
            k = 1
        elif power.startswith("^") and power[1:].isdigit():
            k = int(power[1:])
        else:
            raise QuantumCurveError(f"line {number}: bad power of hbar {head!r}")
        if k in lines:
            raise QuantumCurveError(f"line {number}: hbar^{k} is defined twice")
        lines[k] = body.strip()
    if 0 not in lines:
        raise QuantumCurveError("operator file has no 'hbar^0 : ...' line")

    R, *_ = poly_ring("x,y,Yp,Ym", field.domain)
    polys = {k: evaluate_polynomial(body, R, ["x", "y", "Yp", "Ym"], constants) for k, body in lines.items()}
    uses_y = any(m[1] for p in polys.values() for m in p.monoms())
    uses_shift = any(m[2] or m[3] for p in polys.values() for m in p.monoms())
    if uses_y and uses_shift:
        raise QuantumCurveError("operator mixes y with Yp/Ym")
    flavour = "difference" if uses_shift else "differential"
    graded: Graded = {}
    for k, p in polys.items():
        for (i, a, b, c_), coeff in p.terms():
            j = a if flavour == "differential" else b - c_
            graded[(k, i, j)] = graded.get((k, i, j), field.zero) + coeff
    op = OperatorPolynomial.from_graded(flavour, field, graded, printed, name)
    logger.info("operator %s: %s flavour, hbar order %d", name, flavour, op.order)
    return op


def load_operator(source: Union[str, Path], field: Optional[Field] = None) -> OperatorPolynomial:
    """Load a bundled operator by name or an operator file by path."""
    source = str(source)
    if source in BUNDLED_OPERATORS:
        path = CURVES_DIR / BUNDLED_OPERATORS[source]
    else:
        path = Path(source)
        if not path.is_file() and source in BUNDLED_OPERATORS.values():
            path = CURVES_DIR / source
    if not path.is_file():
        raise QuantumCurveError(
            f"operator file not found: {source}. Bundled: {', '.join(BUNDLED_OPERATORS)}"
        )
    return parse_operator_file(path.read_text(), field, path.stem)


def _format_monomial(flavour: str, i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        if flavour == "differential":
            parts.append("y" if j == 1 else f"y^{j}")
        else:
            base = "Yp" if j > 0 else "Ym"
            parts.append(base if abs(j) == 1 else f"{base}^{abs(j)}")
    return "*".join(parts)


def format_polynomial_part(op: OperatorPolynomial, k: int) -> str:
    pieces = []
    for (i, j), c in sorted(op.term(k).items(), key=lambda t: (-abs(t[0][1]), -t[0][0], -t[0][1])):
        monomial = _format_monomial(op.flavour, i, j)
        coeff = op.field.format(c)
        if " " in coeff:
            coeff = f"({coeff})"
        if not monomial:
            pieces.append(coeff)
        elif coeff in ("1", "-1"):
            pieces.append(monomial if coeff == "1" else f"-{monomial}")
        else:
            pieces.append(f"{coeff}*{monomial}")
    if not pieces:
        return "0"
    text = pieces[0]
    for piece in pieces[1:]:
        text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return text


def format_operator(op: OperatorPolynomial) -> str:
    """Operator-file text; parse_operator_file reads it back to the same operator."""
    lines = [f"# {op.name} ({op.flavour})"]
    for k in range(op.order + 1):
        if op.term(k) or k == 0:
            lines.append(f"hbar^{k} : {format_polynomial_part(op, k)}")
    return "\n".join(lines) + "\n"


# normal ordering -----------------------------------------------------------


def _falling(c: int, j: int) -> int:
    return math.perm(c, j) if j <= c else 0


def multiply(flavour: str, field: Field, a: Graded, b: Graded) -> Graded:
    """
    Normal-ordered product of ħ-graded operators {(k, i, j): c}.

    ŷ^b x^c = Σ_l C(b,l)·c(c−1)⋯(c−l+1)·ħ^l x^{c−l} ŷ^{b−l};
    e^{bŷ} x^c = Σ_l C(c,l)·b^l·ħ^l x^{c−l} e^{bŷ}.
    """
    out: Graded = {}
    for (k1, i1, j1), c1 in a.items():
        for (k2, i2, j2), c2 in b.items():
            if flavour == "differential":
                terms = [
                    (l, math.comb(j1, l) * _falling(i2, l), i2 - l, j1 - l + j2)
                    for l in range(min(j1, i2) + 1)
                ]
            else:
                terms = [
                    (l, math.comb(i2, l) * j1**l, i2 - l, j1 + j2) for l in range(i2 + 1)
                ]
            for l, weight, i, j in terms:
                if not weight:
                    continue
                key = (k1 + k2 + l, i1 + i, j)
                out[key] = out.get(key, field.zero) + c1 * c2 * field.convert(weight)
    return {k: c for k, c in out.items() if c}


def conjugate_operator(op: OperatorPolynomial, g: RationalFunction) -> OperatorPolynomial:
    """
    e^{g(x)/ħ} P̂ e^{−g(x)/ħ}: every ŷ becomes ŷ − g′(x̂), then normal ordered.

    The result annihilates e^{g/ħ}ψ whenever P̂ annihilates ψ.

    Raises:
        QuantumCurveError: difference flavour, or g not a polynomial
    """
    if op.flavour != "differential":
        raise QuantumCurveError("conjugation by e^{g/hbar} is only polynomial for the differential flavour")
    if not g.is_polynomial:
        raise QuantumCurveError(f"g = {g.format()} is not a polynomial")
    field = op.field
    shifted: Graded = {(0, 0, 1): field.one}
    for d, c in enumerate(g.diff().coefficients()):
        if c:
            shifted[(0, d, 0)] = shifted.get((0, d, 0), field.zero) - c
    powers: List[Graded] = [{(0, 0, 0): field.one}]
    result: Graded = {}
    for (k, i, j), c in op.graded().items():
        while len(powers) <= j:
            powers.append(multiply(op.flavour, field, powers[-1], shifted))
        left = {(k, i, 0): c}
        for key, value in multiply(op.flavour, field, left, powers[j]).items():
            result[key] = result.get(key, field.zero) + value
    return OperatorPolynomial.from_graded(
        op.flavour, field, result, op.constants, f"{op.name}_conjugated"
    )


def first_order_operator(lambdas: Sequence, field: Optional[Field] = None) -> OperatorPolynomial:
    """Q(x̂)ŷ − Q′(x̂) with Q = ∏(x − λᵢ); it annihilates Q^{1/ħ}."""
    field = field or Field()
    if not lambdas:
        raise QuantumCurveError("first-order operator needs at least one lambda")
    x = RationalFunction.variable(field, "x")
    Q = RationalFunction.constant(field, 1, "x")
    for lam in lambdas:
        Q = Q * (x - field.parse(str(lam)))
    graded: Graded = {}
    for i, c in enumerate(Q.coefficients()):
        if c:
            graded[(0, i, 1)] = c
    for i, c in enumerate(Q.diff().coefficients()):
        if c:
            graded[(0, i, 0)] = graded.get((0, i, 0), field.zero) - c
    return OperatorPolynomial.from_graded("differential", field, graded, name="first_order")
