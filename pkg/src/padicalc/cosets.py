"""Classification of Q_p^x into n-th-power cosets, and Hensel lifting.

The nonzero n-th powers form a finite-index subgroup; a full set of coset
representatives is built by exhaustive classification of unit residues
modulo p^m, where m = 2*v_p(n) + 1 guarantees that every unit congruent to
1 mod p^m is an n-th power (lift the root of x^n - u from x = 1).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .core import DEFAULT_BUDGET, PLUS_INFINITY, PadicNumber, vp_int
from .errors import (
    BudgetExceeded,
    HenselConditionFailed,
    InsufficientPrecision,
    OutOfDomain,
)

Coefficient = Union[PadicNumber, int, Fraction]


def _as_padic(c: Coefficient, prime: int, precision: int) -> PadicNumber:
    if isinstance(c, PadicNumber):
        if c.prime != prime:
            raise ValueError("coefficient prime does not match")
        return c
    q = Fraction(c)
    if q == 0:
        return PadicNumber.zero(prime)
    return PadicNumber.from_fraction(q, prime, precision)


def poly_eval(coeffs: Sequence[PadicNumber], x: PadicNumber) -> PadicNumber:
    """Horner evaluation, low-degree coefficient first."""
    acc = PadicNumber.zero(x.prime)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[PadicNumber], prime: int, precision: int) -> list[PadicNumber]:
    out = []
    for i, c in enumerate(coeffs[1:], start=1):
        out.append(c * _as_padic(i, prime, precision))
    return out


def hensel_lift(
    f: Sequence[Coefficient],
    x0: PadicNumber,
    target_prec: int,
    max_iter: int = 64,
) -> PadicNumber:
    """Newton-lift a root of f from the approximation x0.

    Requires the strong condition v(f(x0)) > 2*v(f'(x0)); the returned z then
    satisfies f(z) = 0 mod p^target_prec and v(z - x0) > v(f'(x0)), and is the
    unique such root in that ball.
    """
    p = x0.prime
    work = target_prec + 8
    coeffs = [_as_padic(c, p, work + 8) for c in f]
    dcoeffs = poly_derivative(coeffs, p, work + 8)

    x = x0 if x0.is_zero or x0.rel_precision >= work else PadicNumber.from_fraction(
        x0.to_rational(), p, work
    )
    fx = poly_eval(coeffs, x)
    dfx = poly_eval(dcoeffs, x)
    if dfx.is_zero:
        raise HenselConditionFailed("derivative at the start is zero to known precision")
    d = dfx.valuation
    if fx.val_lower_bound() <= 2 * d:
        raise HenselConditionFailed(
            f"v(f(x0)) >= {fx.val_lower_bound()} is not greater than 2*v(f'(x0)) = {2 * d}"
        )

    prev = fx.val_lower_bound()
    for _ in range(max_iter):
        if prev >= target_prec:
            return x
        if fx.is_zero:
            raise InsufficientPrecision(
                "f(x) vanished to working precision before the target was reached"
            )
        x = x - fx / dfx
        fx = poly_eval(coeffs, x)
        dfx = poly_eval(dcoeffs, x)
        if fx.val_lower_bound() <= prev:
            raise InsufficientPrecision(
                "Newton iteration stalled before reaching the target precision"
            )
        prev = fx.val_lower_bound()
    raise HenselConditionFailed(f"no convergence within {max_iter} Newton steps")


def hensel_exponent(p: int, n: int) -> int:
    """Exponent m with 1 + p^m Z_p contained in the n-th powers.

    The uniform sufficient choice 2*v_p(n) + 1 is returned even when a
    smaller exponent would work.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    return 2 * vp_int(n, p) + 1


@dataclass(frozen=True)
class CosetTable:
    """Representatives of the cosets of the nonzero n-th powers.

    Each representative is p^i * u with i in [0, n) and u the smallest
    positive integer in its unit class; ``power_residues`` is the image of
    the units under x -> x^n modulo p^hensel_m, which decides unit-class
    membership exactly.
    """

    prime: int
    exponent: int
    hensel_m: int
    unit_reps: tuple[int, ...]
    power_residues: frozenset[int]

    @property
    def reps(self) -> tuple[tuple[int, int], ...]:
        """(valuation, unit residue mod p^hensel_m) pairs, valuation-major."""
        return tuple(
            (i, u % self.prime**self.hensel_m)
            for i in range(self.exponent)
            for u in self.unit_reps
        )

    @property
    def values(self) -> tuple[int, ...]:
        """The representatives as plain integers p^i * u."""
        return tuple(self.prime**i * u for i in range(self.exponent) for u in self.unit_reps)

    def __len__(self) -> int:
        return self.exponent * len(self.unit_reps)

    def label(self, index: int) -> "CosetLabel":
        return CosetLabel(self, index)

    def as_dict(self) -> dict:
        return {
            "prime": self.prime,
            "n": self.exponent,
            "hensel_m": self.hensel_m,
            "representatives": list(self.values),
        }


@dataclass(frozen=True)
class CosetLabel:
    """One coset, identified by its index into the table's representatives."""

    table: CosetTable
    index: int

    def __post_init__(self):
        if not 0 <= self.index < len(self.table):
            raise ValueError("coset index out of range")

    @property
    def value(self) -> int:
        return self.table.values[self.index]

    def __str__(self) -> str:
        return f"{self.value}*P_{self.table.exponent}"

    __repr__ = __str__


@functools.lru_cache(maxsize=None)
def build_coset_table(p: int, n: int, budget: int = DEFAULT_BUDGET) -> CosetTable:
    """Deterministic coset table for exponent n over Q_p."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    m = hensel_exponent(p, n)
    modulus = p**m
    if modulus > budget:
        raise BudgetExceeded(f"p^m = {modulus} exceeds the budget of {budget}")
    units = [a for a in range(1, modulus) if a % p != 0]
    powers = frozenset(pow(a, n, modulus) for a in units)
    reps: list[int] = []
    covered: set[int] = set()
    for u in units:
        if u in covered:
            continue
        reps.append(u)
        covered.update(u * s % modulus for s in powers)
    return CosetTable(p, n, m, tuple(reps), powers)


def unit_class_index(table: CosetTable, unit_residue: int) -> int:
    """Index of the unit class containing the given unit residue."""
    modulus = table.prime**table.hensel_m
    u = unit_residue % modulus
    for j, rep in enumerate(table.unit_reps):
        if u * pow(rep, -1, modulus) % modulus in table.power_residues:
            return j
    raise AssertionError("coset table does not cover the unit residue")


def classify(x: PadicNumber, table: CosetTable) -> CosetLabel:
    """The unique representative whose coset contains x."""
    if x.prime != table.prime:
        raise ValueError("element prime does not match the table")
    if x.is_exact_zero:
        raise OutOfDomain("zero belongs to no multiplicative coset")
    if x.is_zero:
        raise InsufficientPrecision(
            f"value is zero mod p^{x.zero_bound}; cannot classify without a unit digit"
        )
    if x.rel_precision < table.hensel_m:
        raise InsufficientPrecision(
            f"classification needs {table.hensel_m} unit digits, only {x.rel_precision} known"
        )
    i = x.valuation % table.exponent
    j = unit_class_index(table, x.unit)
    return CosetLabel(table, i * len(table.unit_reps) + j)


def is_nth_power(x: PadicNumber, n: int) -> bool:
    """Whether x is a nonzero n-th power in Q_p."""
    if x.is_exact_zero:
        raise OutOfDomain("zero is not a nonzero n-th power")
    if x.is_zero:
        raise InsufficientPrecision(
            f"value is zero mod p^{x.zero_bound}; n-th power test needs a unit digit"
        )
    table = build_coset_table(x.prime, n)
    if x.rel_precision < table.hensel_m:
        raise InsufficientPrecision(
            f"n-th power test needs {table.hensel_m} unit digits, only {x.rel_precision} known"
        )
    if x.valuation % n != 0:
        return False
    modulus = x.prime**table.hensel_m
    return x.unit % modulus in table.power_residues


def nth_root(x: PadicNumber, n: int, branch: int = 1) -> PadicNumber:
    """An n-th root of x whose unit part is congruent to ``branch`` mod p^m.

    Raises OutOfDomain when x is not an n-th power or no root sits on the
    requested branch.  The root is produced by Hensel lifting and carries
    the relative precision justified by x (n-th roots lose v_p(n) digits).
    """
    p = x.prime
    table = build_coset_table(p, n)
    m = table.hensel_m
    if not is_nth_power(x, n):
        raise OutOfDomain(f"{x} is not an n-th power for n = {n}")
    root_val = x.valuation // n
    root_rel = x.rel_precision - vp_int(n, p)
    if root_rel < 1:
        raise InsufficientPrecision("not enough digits to pin any root digit")
    modulus = p**m
    u = x.unit % modulus
    candidates = [y for y in range(1, modulus) if y % p != 0 and pow(y, n, modulus) == u]
    # distinct candidates within one class mod p^(v_p(n)+1) lift to the same root
    sep = p ** (vp_int(n, p) + 1)
    roots: dict[int, PadicNumber] = {}
    unit_x = PadicNumber(p, 0, x.unit, x.rel_precision)
    for y0 in candidates:
        key = y0 % sep
        if key in roots:
            continue
        start = PadicNumber.from_int(y0, p, max(root_rel, m) + 4)
        lifted = hensel_lift([-unit_x.to_rational(), *([0] * (n - 1)), 1], start, root_rel + m)
        roots[key] = lifted.truncate(root_rel)
    for lifted in roots.values():
        if lifted.unit % modulus == branch % modulus:
            return lifted.shift(root_val)
    raise OutOfDomain(
        f"no n-th root of {x} lies on the branch {branch} mod p^{m}"
    )
