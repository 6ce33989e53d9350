"""Expression trees for the p-adic functions under study.

The arithmetic fragment (rational constants, the variable, +, -, *, /,
integer powers, composition) is extended with three constructs that make the
class interesting: piecewise definitions guarded by coset membership,
valuation, or ball membership; the digit-spreading map that sends the digit
at position i to position d*i; and branch-pinned n-th roots.

Expressions are prime-agnostic; the prime enters through the evaluation
point.  Guards must be decidable from finitely many digits of the input and
evaluation never hides precision loss.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from . import cosets
from .core import (
    DEFAULT_BUDGET,
    Ball,
    PadicNumber,
    enumerate_ball,
    padic_from_residue,
)
from .errors import (
    DivisionByZero,
    GuardUndecidableAtPrecision,
    InsufficientPrecision,
    OutOfDomain,
    ParseError,
    PrecisionInsufficientForImage,
    UnsupportedExpression,
)

DEFAULT_CONST_PRECISION = 64


# -- node types --------------------------------------------------------------


class FuncExpr:
    """Base class; concrete nodes are the frozen dataclasses below."""

    def __call__(self, x: PadicNumber, const_precision: int = DEFAULT_CONST_PRECISION):
        return evaluate(self, x, const_precision)


@dataclass(frozen=True)
class RationalConst(FuncExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(FuncExpr):
    pass


@dataclass(frozen=True)
class Add(FuncExpr):
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True)
class Sub(FuncExpr):
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True)
class Mul(FuncExpr):
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True)
class Div(FuncExpr):
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True)
class IntPow(FuncExpr):
    base: FuncExpr
    exponent: int


@dataclass(frozen=True)
class Compose(FuncExpr):
    outer: FuncExpr
    inner: FuncExpr


@dataclass(frozen=True)
class DigitSpread(FuncExpr):
    """Digit map sending sum(a_i p^i) to sum(a_i p^(d*i))."""

    spread: int

    def __post_init__(self):
        if self.spread < 2:
            raise ValueError("spread factor must be at least 2")


@dataclass(frozen=True)
class NthRootBranch(FuncExpr):
    """The n-th root whose unit part is `branch` mod p^hensel_m."""

    degree: int
    branch: int = 1


class Guard:
    """Base class for piecewise guards."""


@dataclass(frozen=True)
class CosetIs(Guard):
    """Membership of x in lam * (nonzero n-th powers)."""

    exponent: int
    coset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coset", Fraction(self.coset))
        if self.coset == 0:
            raise ValueError("coset representative must be nonzero")


@dataclass(frozen=True)
class ValuationIn(Guard):
    """v(x) in a finite set, or in a congruence class mod a modulus."""

    values: frozenset[int] | None = None
    residue: int | None = None
    modulus: int | None = None

    def __post_init__(self):
        if self.values is not None:
            object.__setattr__(self, "values", frozenset(self.values))
            if self.residue is not None or self.modulus is not None:
                raise ValueError("give either a value set or a congruence, not both")
        else:
            if self.modulus is None or self.residue is None or self.modulus < 1:
                raise ValueError("congruence form needs residue and positive modulus")


@dataclass(frozen=True)
class InBall(Guard):
    """Membership in the ball {v(x - center) >= radius_val}; prime bound late."""

    center: Fraction
    radius_val: int

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))

    def ball(self, prime: int) -> Ball:
        return Ball.from_rational_center(
            self.center.numerator, self.center.denominator, prime, self.radius_val
        )


@dataclass(frozen=True)
class Otherwise(Guard):
    pass


@dataclass(frozen=True)
class Piecewise(FuncExpr):
    cases: tuple[tuple[Guard, FuncExpr], ...]

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple((g, e) for g, e in self.cases))
        if not self.cases:
            raise ValueError("a piecewise expression needs at least one case")


# -- smart constructors (light constant folding) ------------------------------


def const(value) -> RationalConst:
    return RationalConst(Fraction(value))


ZERO = const(0)
ONE = const(1)
X = Var()


def _is_const(e: FuncExpr, v=None) -> bool:
    return isinstance(e, RationalConst) and (v is None or e.value == v)


def add(a: FuncExpr, b: FuncExpr) -> FuncExpr:
    if _is_const(a) and _is_const(b):
        return const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def sub(a: FuncExpr, b: FuncExpr) -> FuncExpr:
    if _is_const(a) and _is_const(b):
        return const(a.value - b.value)
    if _is_const(b, 0):
        return a
    return Sub(a, b)


def mul(a: FuncExpr, b: FuncExpr) -> FuncExpr:
    if _is_const(a) and _is_const(b):
        return const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def div(a: FuncExpr, b: FuncExpr) -> FuncExpr:
    if _is_const(b) and b.value != 0:
        if _is_const(a):
            return const(a.value / b.value)
        if b.value == 1:
            return a
    return Div(a, b)


def intpow(base: FuncExpr, e: int) -> FuncExpr:
    if e == 1:
        return base
    if _is_const(base) and (base.value != 0 or e > 0):
        return const(base.value**e)
    return IntPow(base, e)


def compose(outer: FuncExpr, inner: FuncExpr) -> FuncExpr:
    if isinstance(inner, Var):
        return outer
    if isinstance(outer, Var):
        return inner
    return Compose(outer, inner)


# -- evaluation ---------------------------------------------------------------


def _const_value(value: Fraction, prime: int, const_precision: int) -> PadicNumber:
    if value == 0:
        return PadicNumber.zero(prime)
    return PadicNumber.from_fraction(value, prime, const_precision)


def digit_spread_value(x: PadicNumber, d: int) -> PadicNumber:
    """Apply the digit map to a value; output known modulo p^(d*A) for input mod p^A."""
    if x.is_exact_zero:
        return x
    if x.is_zero:
        return PadicNumber.zero(x.prime, d * x.zero_bound)
    p = x.prime
    unit = sum(dig * p ** (d * i) for i, dig in enumerate(x.digits()))
    return PadicNumber(p, d * x.valuation, unit, d * x.rel_precision)


def guard_holds(guard: Guard, x: PadicNumber) -> bool:
    """Decide a guard from the known digits; raises when they do not suffice."""
    if isinstance(guard, Otherwise):
        return True
    if isinstance(guard, CosetIs):
        if x.is_exact_zero:
            return False
        if x.is_zero:
            raise GuardUndecidableAtPrecision(
                f"coset membership undecidable for a zero mod p^{x.zero_bound}"
            )
        table = cosets.build_coset_table(x.prime, guard.exponent)
        lam = PadicNumber.from_fraction(
            guard.coset, x.prime, table.hensel_m + 2
        )
        try:
            return cosets.classify(x, table).index == cosets.classify(lam, table).index
        except InsufficientPrecision as exc:
            raise GuardUndecidableAtPrecision(str(exc)) from exc
    if isinstance(guard, ValuationIn):
        if x.is_exact_zero:
            return False
        if x.is_zero:
            if guard.values is not None and all(v < x.zero_bound for v in guard.values):
                return False
            raise GuardUndecidableAtPrecision(
                f"valuation only known to be >= {x.zero_bound}"
            )
        if guard.values is not None:
            return x.valuation in guard.values
        return x.valuation % guard.modulus == guard.residue % guard.modulus
    if isinstance(guard, InBall):
        ball = guard.ball(x.prime)
        try:
            return ball.contains(x)
        except InsufficientPrecision as exc:
            raise GuardUndecidableAtPrecision(str(exc)) from exc
    raise UnsupportedExpression(f"unknown guard {guard!r}")


def evaluate(
    expr: FuncExpr, x: PadicNumber, const_precision: int = DEFAULT_CONST_PRECISION
) -> PadicNumber:
    """Evaluate the expression at x; the result's precision is never overstated."""
    p = x.prime
    if isinstance(expr, RationalConst):
        return _const_value(expr.value, p, const_precision)
    if isinstance(expr, Var):
        return x
    if isinstance(expr, Add):
        return evaluate(expr.left, x, const_precision) + evaluate(expr.right, x, const_precision)
    if isinstance(expr, Sub):
        return evaluate(expr.left, x, const_precision) - evaluate(expr.right, x, const_precision)
    if isinstance(expr, Mul):
        return evaluate(expr.left, x, const_precision) * evaluate(expr.right, x, const_precision)
    if isinstance(expr, Div):
        num = evaluate(expr.left, x, const_precision)
        den = evaluate(expr.right, x, const_precision)
        if den.is_zero:
            raise DivisionByZero("denominator vanishes to known precision")
        return num / den
    if isinstance(expr, IntPow):
        base = evaluate(expr.base, x, const_precision)
        if expr.exponent == 0:
            if base.is_zero:
                raise OutOfDomain("0**0 is undefined")
            return _const_value(Fraction(1), p, const_precision)
        if expr.exponent < 0 and base.is_zero:
            raise DivisionByZero("negative power of a value vanishing to known precision")
        return base**expr.exponent
    if isinstance(expr, Compose):
        return evaluate(expr.outer, evaluate(expr.inner, x, const_precision), const_precision)
    if isinstance(expr, DigitSpread):
        return digit_spread_value(x, expr.spread)
    if isinstance(expr, NthRootBranch):
        if x.is_exact_zero:
            return x
        if x.is_zero:
            raise InsufficientPrecision(
                f"root of a zero mod p^{x.zero_bound} is not determined"
            )
        try:
            return cosets.nth_root(x, expr.degree, expr.branch)
        except OutOfDomain:
            raise
    if isinstance(expr, Piecewise):
        for guard, body in expr.cases:
            if guard_holds(guard, x):
                return evaluate(body, x, const_precision)
        raise OutOfDomain("no piecewise guard matched the input")
    raise UnsupportedExpression(f"cannot evaluate node {expr!r}")


# -- symbolic differentiation -------------------------------------------------


def symbolic_derivative(expr: FuncExpr) -> FuncExpr:
    """Derivative of the arithmetic fragment; valid on each guard's interior."""
    if isinstance(expr, RationalConst):
        return ZERO
    if isinstance(expr, Var):
        return ONE
    if isinstance(expr, Add):
        return add(symbolic_derivative(expr.left), symbolic_derivative(expr.right))
    if isinstance(expr, Sub):
        return sub(symbolic_derivative(expr.left), symbolic_derivative(expr.right))
    if isinstance(expr, Mul):
        return add(
            mul(symbolic_derivative(expr.left), expr.right),
            mul(expr.left, symbolic_derivative(expr.right)),
        )
    if isinstance(expr, Div):
        num = sub(
            mul(symbolic_derivative(expr.left), expr.right),
            mul(expr.left, symbolic_derivative(expr.right)),
        )
        return div(num, intpow(expr.right, 2))
    if isinstance(expr, IntPow):
        e = expr.exponent
        if e == 0:
            return ZERO
        return mul(
            mul(const(e), intpow(expr.base, e - 1)),
            symbolic_derivative(expr.base),
        )
    if isinstance(expr, Compose):
        return mul(
            compose(symbolic_derivative(expr.outer), expr.inner),
            symbolic_derivative(expr.inner),
        )
    if isinstance(expr, NthRootBranch):
        # implicit differentiation of y^n = x gives y' = y / (n x)
        return div(expr, mul(const(expr.degree), X))
    if isinstance(expr, Piecewise):
        return Piecewise(tuple((g, symbolic_derivative(b)) for g, b in expr.cases))
    if isinstance(expr, DigitSpread):
        raise UnsupportedExpression("the digit-spreading map has no symbolic derivative")
    raise UnsupportedExpression(f"cannot differentiate node {expr!r}")


# -- forward images -----------------------------------------------------------


def image_residues(
    expr: FuncExpr,
    ball: Ball,
    k_in: int,
    k_out: int,
    budget: int = DEFAULT_BUDGET,
    const_precision: int = DEFAULT_CONST_PRECISION,
) -> set[Fraction]:
    """Exact forward image { f(x) mod p^k_out : x residue of the ball mod p^k_in }.

    Every input is taken with absolute precision exactly k_in; if any output
    is then not determined modulo p^k_out the computation refuses rather
    than inventing digits.
    """
    p = ball.prime
    out: set[Fraction] = set()
    for res in enumerate_ball(ball, k_in, budget=budget):
        x = padic_from_residue(res, p, k_in)
        y = evaluate(expr, x, const_precision)
        if y.abs_precision < k_out:
            raise PrecisionInsufficientForImage(
                f"image of {res} known mod p^{y.abs_precision}, "
                f"but residues mod p^{k_out} were requested"
            )
        out.add(y.residue(k_out))
    return out


# -- textual syntax -----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<int>\d+)|(?P<sym>[-+*/^(){}:;,]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"cannot tokenize {text[pos:]!r}")
        if m.group("name"):
            tokens.append(("name", m.group("name")))
        elif m.group("int"):
            tokens.append(("int", m.group("int")))
        else:
            tokens.append(("sym", m.group("sym")))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


_SPREAD_RE = re.compile(r"^spread(\d+)$")
_ROOT_RE = re.compile(r"^root(\d+)(?:_(\d+))?$")


class _Parser:
    """Recursive descent over +,- < *,/ < ^ with cases{...} blocks."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or kind}, found {tok[1]!r}")
        return tok

    def parse(self) -> FuncExpr:
        expr = self.expression()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input near {self.peek()[1]!r}")
        return expr

    def expression(self) -> FuncExpr:
        node = self.term()
        while self.peek() == ("sym", "+") or self.peek() == ("sym", "-"):
            op = self.next()[1]
            rhs = self.term()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def term(self) -> FuncExpr:
        node = self.power()
        while self.peek() == ("sym", "*") or self.peek() == ("sym", "/"):
            op = self.next()[1]
            rhs = self.power()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def power(self) -> FuncExpr:
        node = self.atom()
        if self.peek() == ("sym", "^"):
            self.next()
            sign = 1
            if self.peek() == ("sym", "-"):
                self.next()
                sign = -1
            e = int(self.expect("int")[1]) * sign
            node = intpow(node, e)
        return node

    def atom(self) -> FuncExpr:
        kind, value = self.peek()
        if kind == "sym" and value == "-":
            self.next()
            return sub(ZERO, self.atom_with_power())
        if kind == "sym" and value == "(":
            self.next()
            node = self.expression()
            self.expect("sym", ")")
            return node
        if kind == "int":
            self.next()
            return const(int(value))
        if kind == "name":
            if value == "x":
                self.next()
                return X
            if value == "cases":
                return self.cases_block()
            m = _SPREAD_RE.match(value)
            if m:
                self.next()
                self.expect("sym", "(")
                inner = self.expression()
                self.expect("sym", ")")
                return compose(DigitSpread(int(m.group(1))), inner)
            m = _ROOT_RE.match(value)
            if m:
                self.next()
                self.expect("sym", "(")
                inner = self.expression()
                self.expect("sym", ")")
                branch = int(m.group(2)) if m.group(2) else 1
                return compose(NthRootBranch(int(m.group(1)), branch), inner)
        raise ParseError(f"unexpected token {value!r}")

    def atom_with_power(self) -> FuncExpr:
        node = self.atom()
        if self.peek() == ("sym", "^"):
            self.next()
            sign = 1
            if self.peek() == ("sym", "-"):
                self.next()
                sign = -1
            e = int(self.expect("int")[1]) * sign
            node = intpow(node, e)
        return node

    def cases_block(self) -> FuncExpr:
        self.expect("name", "cases")
        self.expect("sym", "{")
        cases = []
        while True:
            guard = self.guard()
            self.expect("sym", ":")
            body = self.expression()
            cases.append((guard, body))
            kind, value = self.next()
            if (kind, value) == ("sym", ";"):
                continue
            if (kind, value) == ("sym", "}"):
                break
            raise ParseError(f"expected ';' or '}}' in cases, found {value!r}")
        return Piecewise(tuple(cases))

    def rational_literal(self) -> Fraction:
        sign = 1
        if self.peek() == ("sym", "-"):
            self.next()
            sign = -1
        num = int(self.expect("int")[1])
        if self.peek() == ("sym", "/"):
            self.next()
            den = int(self.expect("int")[1])
            return Fraction(sign * num, den)
        return Fraction(sign * num)

    def signed_int(self) -> int:
        sign = 1
        if self.peek() == ("sym", "-"):
            self.next()
            sign = -1
        return sign * int(self.expect("int")[1])

    def guard(self) -> Guard:
        kind, value = self.next()
        if kind != "name":
            raise ParseError(f"expected a guard, found {value!r}")
        if value == "else":
            return Otherwise()
        if value == "coset":
            self.expect("sym", "(")
            n = int(self.expect("int")[1])
            self.expect("sym", ",")
            lam = self.rational_literal()
            self.expect("sym", ")")
            return CosetIs(n, lam)
        if value == "val":
            self.expect("sym", "(")
            first = self.signed_int()
            if self.peek() == ("name", "mod"):
                self.next()
                modulus = int(self.expect("int")[1])
                self.expect("sym", ")")
                return ValuationIn(residue=first, modulus=modulus)
            values = [first]
            while self.peek() == ("sym", ","):
                self.next()
                values.append(self.signed_int())
            self.expect("sym", ")")
            return ValuationIn(values=frozenset(values))
        if value == "ball":
            self.expect("sym", "(")
            center = self.rational_literal()
            self.expect("sym", ",")
            r = self.signed_int()
            self.expect("sym", ")")
            return InBall(center, r)
        raise ParseError(f"unknown guard {value!r}")


def parse_expr(text: str) -> FuncExpr:
    """Parse the compact expression syntax, e.g. 'x^2 + 1' or 'spread2(x)'."""
    return _Parser(text).parse()


def format_expr(expr: FuncExpr) -> str:
    """Compact textual rendering; parse_expr(format_expr(e)) evaluates like e."""
    if isinstance(expr, RationalConst):
        v = expr.value
        if v.denominator == 1:
            return str(v.numerator) if v >= 0 else f"(0 - {-v.numerator})"
        s = f"{abs(v.numerator)}/{v.denominator}"
        return s if v >= 0 else f"(0 - {s})"
    if isinstance(expr, Var):
        return "x"
    if isinstance(expr, Add):
        return f"({format_expr(expr.left)} + {format_expr(expr.right)})"
    if isinstance(expr, Sub):
        return f"({format_expr(expr.left)} - {format_expr(expr.right)})"
    if isinstance(expr, Mul):
        return f"({format_expr(expr.left)} * {format_expr(expr.right)})"
    if isinstance(expr, Div):
        return f"({format_expr(expr.left)} / {format_expr(expr.right)})"
    if isinstance(expr, IntPow):
        return f"{format_expr(expr.base)}^{expr.exponent}"
    if isinstance(expr, Compose):
        if isinstance(expr.outer, DigitSpread):
            return f"spread{expr.outer.spread}({format_expr(expr.inner)})"
        if isinstance(expr.outer, NthRootBranch):
            return f"root{expr.outer.degree}_{expr.outer.branch}({format_expr(expr.inner)})"
        return f"({format_expr(expr.outer)})({format_expr(expr.inner)})"
    if isinstance(expr, DigitSpread):
        return f"spread{expr.spread}(x)"
    if isinstance(expr, NthRootBranch):
        return f"root{expr.degree}_{expr.branch}(x)"
    if isinstance(expr, Piecewise):
        parts = [f"{_format_guard(g)}: {format_expr(b)}" for g, b in expr.cases]
        return "cases{" + "; ".join(parts) + "}"
    raise UnsupportedExpression(f"cannot format {expr!r}")


def _format_guard(guard: Guard) -> str:
    if isinstance(guard, Otherwise):
        return "else"
    if isinstance(guard, CosetIs):
        lam = guard.coset
        lam_s = str(lam.numerator) if lam.denominator == 1 else f"{lam.numerator}/{lam.denominator}"
        return f"coset({guard.exponent}, {lam_s})"
    if isinstance(guard, ValuationIn):
        if guard.values is not None:
            return "val(" + ", ".join(str(v) for v in sorted(guard.values)) + ")"
        return f"val({guard.residue} mod {guard.modulus})"
    if isinstance(guard, InBall):
        c = guard.center
        c_s = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        return f"ball({c_s}, {guard.radius_val})"
    raise UnsupportedExpression(f"cannot format guard {guard!r}")


# -- JSON form ----------------------------------------------------------------


def _fraction_to_json(q: Fraction):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fraction_from_json(v) -> Fraction:
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(v)


def guard_to_dict(guard: Guard) -> dict:
    if isinstance(guard, Otherwise):
        return {"tag": "Otherwise"}
    if isinstance(guard, CosetIs):
        return {"tag": "CosetIs", "exponent": guard.exponent, "coset": _fraction_to_json(guard.coset)}
    if isinstance(guard, ValuationIn):
        if guard.values is not None:
            return {"tag": "ValuationIn", "values": sorted(guard.values)}
        return {"tag": "ValuationIn", "residue": guard.residue, "modulus": guard.modulus}
    if isinstance(guard, InBall):
        return {
            "tag": "InBall",
            "center": _fraction_to_json(guard.center),
            "radius_val": guard.radius_val,
        }
    raise UnsupportedExpression(f"cannot serialize guard {guard!r}")


def guard_from_dict(d: dict) -> Guard:
    tag = d.get("tag")
    if tag == "Otherwise":
        return Otherwise()
    if tag == "CosetIs":
        return CosetIs(d["exponent"], _fraction_from_json(d["coset"]))
    if tag == "ValuationIn":
        if "values" in d:
            return ValuationIn(values=frozenset(d["values"]))
        return ValuationIn(residue=d["residue"], modulus=d["modulus"])
    if tag == "InBall":
        return InBall(_fraction_from_json(d["center"]), d["radius_val"])
    raise ParseError(f"unknown guard tag {tag!r}")


def expr_to_dict(expr: FuncExpr) -> dict:
    if isinstance(expr, RationalConst):
        return {"tag": "RationalConst", "value": _fraction_to_json(expr.value)}
    if isinstance(expr, Var):
        return {"tag": "Var"}
    for cls, tag in ((Add, "Add"), (Sub, "Sub"), (Mul, "Mul"), (Div, "Div")):
        if isinstance(expr, cls):
            return {"tag": tag, "left": expr_to_dict(expr.left), "right": expr_to_dict(expr.right)}
    if isinstance(expr, IntPow):
        return {"tag": "IntPow", "base": expr_to_dict(expr.base), "exponent": expr.exponent}
    if isinstance(expr, Compose):
        return {"tag": "Compose", "outer": expr_to_dict(expr.outer), "inner": expr_to_dict(expr.inner)}
    if isinstance(expr, DigitSpread):
        return {"tag": "DigitSpread", "spread": expr.spread}
    if isinstance(expr, NthRootBranch):
        return {"tag": "NthRootBranch", "degree": expr.degree, "branch": expr.branch}
    if isinstance(expr, Piecewise):
        return {
            "tag": "Piecewise",
            "cases": [
                {"guard": guard_to_dict(g), "body": expr_to_dict(b)} for g, b in expr.cases
            ],
        }
    raise UnsupportedExpression(f"cannot serialize {expr!r}")


def expr_from_dict(d: dict) -> FuncExpr:
    tag = d.get("tag")
    if tag == "RationalConst":
        return RationalConst(_fraction_from_json(d["value"]))
    if tag == "Var":
        return Var()
    binary = {"Add": Add, "Sub": Sub, "Mul": Mul, "Div": Div}
    if tag in binary:
        return binary[tag](expr_from_dict(d["left"]), expr_from_dict(d["right"]))
    if tag == "IntPow":
        return IntPow(expr_from_dict(d["base"]), d["exponent"])
    if tag == "Compose":
        return Compose(expr_from_dict(d["outer"]), expr_from_dict(d["inner"]))
    if tag == "DigitSpread":
        return DigitSpread(d["spread"])
    if tag == "NthRootBranch":
        return NthRootBranch(d["degree"], d.get("branch", 1))
    if tag == "Piecewise":
        return Piecewise(
            tuple(
                (guard_from_dict(c["guard"]), expr_from_dict(c["body"]))
                for c in d["cases"]
            )
        )
    raise ParseError(f"unknown expression tag {tag!r}")


def load_expr(text: str) -> FuncExpr:
    """Accept either the compact syntax or a JSON AST document."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return expr_from_dict(json.loads(stripped))
    return parse_expr(stripped)
