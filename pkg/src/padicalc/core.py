"""Exact elements of the p-adic rationals at finite precision, and valuation balls.

A nonzero element is stored as ``unit * p**valuation`` with the unit known
modulo ``p**rel_precision``; the element itself is then known modulo
``p**(valuation + rel_precision)``.  A zero is either exact (it came from the
rational number 0) or known only to vanish modulo ``p**zero_bound``; total
cancellation in add/sub produces the second kind, never a silent exact zero.

Balls are the closed valuation balls ``{x : v(x - c) >= r}``.  Because the
value group is discrete these coincide with open balls of radius ``p**-(r-1)``,
so a single canonical form suffices.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    DivisionByZero,
    IndistinguishableAtPrecision,
    InsufficientPrecision,
    ParseError,
)

PLUS_INFINITY = float("inf")

DEFAULT_REL_PRECISION = 8
DEFAULT_BUDGET = 10**6


@functools.lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (desk-scale inputs)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer: the exponent of p dividing n."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined; handle zero separately")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(q: Fraction, p: int) -> int:
    """Valuation of a nonzero rational."""
    if q == 0:
        raise ValueError("valuation of 0 is undefined; handle zero separately")
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def reduce_fraction_mod(q: Fraction, p: int, k: int) -> Fraction:
    """Canonical representative of q modulo p^k Z_p.

    The representative is the finite digit sum over positions v..k-1, a
    rational whose denominator is a power of p (an integer when v >= 0).
    """
    q = Fraction(q)
    if q == 0:
        return Fraction(0)
    v = vp_fraction(q, p)
    if v >= k:
        return Fraction(0)
    t = max(0, -v)
    scaled = q * p**t
    modulus = p ** (k + t)
    w = scaled.numerator * pow(scaled.denominator, -1, modulus) % modulus
    return Fraction(w, p**t)


def _capped(rep: Fraction, p: int, cap) -> "PadicNumber":
    """Value congruent to ``rep`` modulo ``p**cap``, as a PadicNumber."""
    if cap == PLUS_INFINITY:
        if rep != 0:
            raise AssertionError("exact nonzero values are not representable")
        return PadicNumber.zero(p)
    cap = int(cap)
    if rep == 0:
        return PadicNumber.zero(p, cap)
    v = vp_fraction(rep, p)
    if v >= cap:
        return PadicNumber.zero(p, cap)
    n = cap - v
    unit_frac = rep / Fraction(p) ** v
    modulus = p**n
    u = unit_frac.numerator * pow(unit_frac.denominator, -1, modulus) % modulus
    return PadicNumber(p, v, u, n)


@dataclass(frozen=True)
class PadicNumber:
    """One element of Q_p, known to finite precision.

    For a nonzero value, ``unit`` is reduced into [1, p**rel_precision) and is
    not divisible by p.  For a zero, ``unit`` is 0 and ``zero_bound`` is the
    absolute precision M of the statement "congruent to 0 mod p^M"; a
    ``zero_bound`` of None marks the exact zero coming from rational input.
    """

    prime: int
    valuation: int = 0
    unit: int = 0
    rel_precision: int = 0
    zero_bound: int | None = None

    def __post_init__(self):
        p = self.prime
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if self.unit == 0:
            if self.valuation != 0 or self.rel_precision != 0:
                raise ValueError("zero must carry no unit digits")
            if self.zero_bound is not None and not isinstance(self.zero_bound, int):
                raise ValueError("zero_bound must be an int or None")
        else:
            if self.zero_bound is not None:
                raise ValueError("nonzero values carry no zero_bound")
            if self.rel_precision < 1:
                raise ValueError("nonzero values need at least one known digit")
            m = p**self.rel_precision
            u = self.unit % m
            if u % p == 0:
                raise ValueError("unit part must be invertible mod p")
            object.__setattr__(self, "unit", u)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, prime: int, bound: int | None = None) -> "PadicNumber":
        """Zero mod p^bound, or the exact zero when bound is None."""
        return cls(prime, 0, 0, 0, bound)

    @classmethod
    def from_rational(cls, a: int, b: int, prime: int, precision: int) -> "PadicNumber":
        """Exact image of a/b in Q_p to relative precision ``precision``."""
        if b == 0:
            raise DivisionByZero("rational input with denominator 0")
        if precision < 1:
            raise ValueError("precision must be at least 1")
        if a == 0:
            return cls.zero(prime)
        q = Fraction(a, b)
        v = vp_fraction(q, prime)
        unit_frac = q / Fraction(prime) ** v
        modulus = prime**precision
        u = unit_frac.numerator * pow(unit_frac.denominator, -1, modulus) % modulus
        return cls(prime, v, u, precision)

    @classmethod
    def from_int(cls, n: int, prime: int, precision: int) -> "PadicNumber":
        return cls.from_rational(n, 1, prime, precision)

    @classmethod
    def from_fraction(cls, q: Fraction, prime: int, precision: int) -> "PadicNumber":
        q = Fraction(q)
        return cls.from_rational(q.numerator, q.denominator, prime, precision)

    # -- state predicates and views ---------------------------------------

    @property
    def is_zero(self) -> bool:
        """True when no nonzero digit is known (includes the exact zero)."""
        return self.unit == 0

    @property
    def is_exact_zero(self) -> bool:
        return self.unit == 0 and self.zero_bound is None

    @property
    def abs_precision(self):
        """Exponent A such that the value is known modulo p^A."""
        if self.unit != 0:
            return self.valuation + self.rel_precision
        if self.zero_bound is None:
            return PLUS_INFINITY
        return self.zero_bound

    def val(self):
        """Valuation, PLUS_INFINITY for any zero (exact or at precision)."""
        return self.valuation if self.unit != 0 else PLUS_INFINITY

    def val_lower_bound(self):
        """Largest exponent k with v(self) >= k certified by the known digits."""
        if self.unit != 0:
            return self.valuation
        return PLUS_INFINITY if self.zero_bound is None else self.zero_bound

    def to_rational(self) -> Fraction:
        """Canonical representative: the known digits as an exact rational."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def residue(self, k: int) -> Fraction:
        """Canonical representative modulo p^k; needs abs_precision >= k."""
        if self.abs_precision < k:
            raise InsufficientPrecision(
                f"value known mod p^{self.abs_precision}, residue mod p^{k} requested"
            )
        return reduce_fraction_mod(self.to_rational(), self.prime, k)

    def truncate(self, k: int) -> "PadicNumber":
        """Cap the absolute precision at k (forget digits at p^k and beyond)."""
        return _capped(self.to_rational(), self.prime, min(self.abs_precision, k))

    def digits(self, count: int | None = None) -> list[int]:
        """Unit digits d_0..d_{count-1}; count defaults to all known digits."""
        if self.unit == 0:
            raise InsufficientPrecision("a zero has no unit digits")
        if count is None:
            count = self.rel_precision
        if count > self.rel_precision:
            raise InsufficientPrecision(
                f"only {self.rel_precision} digits known, {count} requested"
            )
        out = []
        u = self.unit
        for _ in range(count):
            u, d = divmod(u, self.prime)
            out.append(d)
        return out

    def shift(self, k: int) -> "PadicNumber":
        """Multiply by p**k (exact rescaling, no digit loss)."""
        if self.unit != 0:
            return PadicNumber(self.prime, self.valuation + k, self.unit, self.rel_precision)
        if self.zero_bound is None:
            return self
        return PadicNumber.zero(self.prime, self.zero_bound + k)

    def agrees_to(self, other: "PadicNumber", k: int) -> bool:
        """Whether v(self - other) >= k; raises when that is undecidable."""
        d = self - other
        if d.unit != 0:
            return d.valuation >= k
        if d.abs_precision >= k:
            return True
        raise IndistinguishableAtPrecision(
            f"difference only known mod p^{d.abs_precision}, cannot test v >= {k}"
        )

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        if other.prime != self.prime:
            raise ValueError(f"mixed primes {self.prime} and {other.prime}")
        return other

    def __add__(self, other):
        other = self._check_compatible(other)
        if other is NotImplemented:
            return NotImplemented
        rep = self.to_rational() + other.to_rational()
        cap = min(self.abs_precision, other.abs_precision)
        return _capped(rep, self.prime, cap)

    def __neg__(self):
        if self.unit == 0:
            return self
        m = self.prime**self.rel_precision
        return PadicNumber(self.prime, self.valuation, (-self.unit) % m, self.rel_precision)

    def __sub__(self, other):
        other = self._check_compatible(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._check_compatible(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.prime
        r1, r2 = self.to_rational(), other.to_rational()
        rv1 = vp_fraction(r1, p) if r1 != 0 else PLUS_INFINITY
        rv2 = vp_fraction(r2, p) if r2 != 0 else PLUS_INFINITY
        e1, e2 = self.abs_precision, other.abs_precision
        cap = min(rv1 + e2, rv2 + e1, e1 + e2)
        return _capped(r1 * r2, p, cap)

    def _invert(self) -> "PadicNumber":
        if self.unit == 0:
            kind = "exact zero" if self.zero_bound is None else f"zero mod p^{self.zero_bound}"
            raise DivisionByZero(f"division by {kind}")
        m = self.prime**self.rel_precision
        return PadicNumber(self.prime, -self.valuation, pow(self.unit, -1, m), self.rel_precision)

    def __truediv__(self, other):
        other = self._check_compatible(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other._invert()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e == 0:
            if self.unit == 0:
                raise ValueError("0**0 is undefined")
            return PadicNumber(self.prime, 0, 1, self.rel_precision)
        base = self if e > 0 else self._invert()
        out = base
        for _ in range(abs(e) - 1):
            out = out * base
        return out

    # -- textual form ------------------------------------------------------

    def __str__(self) -> str:
        p = self.prime
        if self.unit == 0:
            if self.zero_bound is None:
                return "0"
            return f"O({p}^{self.zero_bound})"
        terms = []
        for i, d in enumerate(self.digits()):
            if i == 0:
                terms.append(str(d))
            elif i == 1:
                terms.append(f"{d}*{p}")
            else:
                terms.append(f"{d}*{p}^{i}")
        body = " + ".join(terms)
        return f"{p}^{self.valuation} * ({body}) + O({p}^{self.abs_precision})"

    def __repr__(self) -> str:
        return f"PadicNumber({self}, p={self.prime})"


_ZERO_RE = re.compile(r"^O\((\d+)\^(-?\d+)\)$")
_FULL_RE = re.compile(r"^(\d+)\^(-?\d+)\*\((.*)\)\+O\((\d+)\^(-?\d+)\)$")
_TERM0_RE = re.compile(r"^(\d+)$")
_TERM1_RE = re.compile(r"^(\d+)\*(\d+)$")
_TERMI_RE = re.compile(r"^(\d+)\*(\d+)\^(\d+)$")


def parse_padic(text: str, prime: int | None = None) -> PadicNumber:
    """Parse the canonical textual form; inverse of str() bit for bit."""
    compact = text.replace(" ", "")
    if compact == "0":
        if prime is None:
            raise ParseError("the exact zero needs an explicit prime")
        return PadicNumber.zero(prime)
    m = _ZERO_RE.match(compact)
    if m:
        p, bound = int(m.group(1)), int(m.group(2))
        _check_parsed_prime(p, prime)
        return PadicNumber.zero(p, bound)
    m = _FULL_RE.match(compact)
    if m is None:
        raise ParseError(f"not a canonical p-adic literal: {text!r}")
    p, v, body, p2, oexp = int(m.group(1)), int(m.group(2)), m.group(3), int(m.group(4)), int(m.group(5))
    if p != p2:
        raise ParseError(f"inconsistent primes {p} and {p2} in {text!r}")
    _check_parsed_prime(p, prime)
    digits = []
    for i, term in enumerate(body.split("+")):
        if i == 0:
            t = _TERM0_RE.match(term)
            if t is None:
                raise ParseError(f"bad leading digit term {term!r}")
            digits.append(int(t.group(1)))
        elif i == 1:
            t = _TERM1_RE.match(term)
            if t is None or int(t.group(2)) != p:
                raise ParseError(f"bad digit term {term!r}")
            digits.append(int(t.group(1)))
        else:
            t = _TERMI_RE.match(term)
            if t is None or int(t.group(2)) != p or int(t.group(3)) != i:
                raise ParseError(f"bad digit term {term!r} at position {i}")
            digits.append(int(t.group(1)))
    if any(not 0 <= d < p for d in digits):
        raise ParseError(f"digit out of range in {text!r}")
    if digits[0] == 0:
        raise ParseError(f"leading digit must be nonzero in {text!r}")
    n = len(digits)
    if oexp != v + n:
        raise ParseError(f"precision tail O({p}^{oexp}) does not match {n} digits at valuation {v}")
    unit = sum(d * p**i for i, d in enumerate(digits))
    return PadicNumber(p, v, unit, n)


def _check_parsed_prime(p: int, expected: int | None):
    if expected is not None and p != expected:
        raise ParseError(f"expected prime {expected}, literal uses {p}")


def val(x: PadicNumber):
    """Valuation of x; PLUS_INFINITY for a zero."""
    return x.val()


# -- ultrametric balls -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed valuation ball {x : v(x - center) >= radius_val}.

    Equality and hashing use the center reduced mod p^radius_val, so two
    balls are equal exactly when they are the same set.
    """

    prime: int
    center: PadicNumber
    radius_val: int

    def __post_init__(self):
        if self.center.prime != self.prime:
            raise ValueError("center prime does not match ball prime")
        if self.center.abs_precision < self.radius_val:
            raise InsufficientPrecision(
                f"center known mod p^{self.center.abs_precision}, "
                f"cannot pin a ball of radius valuation {self.radius_val}"
            )

    @classmethod
    def zp(cls, prime: int) -> "Ball":
        """The unit ball Z_p."""
        return cls(prime, PadicNumber.zero(prime), 0)

    @classmethod
    def from_rational_center(cls, a: int, b: int, prime: int, radius_val: int) -> "Ball":
        if a == 0:
            return cls(prime, PadicNumber.zero(prime), radius_val)
        v = vp_fraction(Fraction(a, b), prime)
        center = PadicNumber.from_rational(a, b, prime, max(1, radius_val - v + 4))
        return cls(prime, center, radius_val)

    @classmethod
    def from_open_radius(cls, center: PadicNumber, k: int) -> "Ball":
        """Open ball of radius p**-k equals the closed ball of radius valuation k+1."""
        return cls(center.prime, center, k + 1)

    @property
    def center_residue(self) -> Fraction:
        return self.center.residue(self.radius_val)

    def __eq__(self, other):
        if not isinstance(other, Ball):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.radius_val == other.radius_val
            and self.center_residue == other.center_residue
        )

    def __hash__(self):
        return hash((self.prime, self.radius_val, self.center_residue))

    def contains(self, x: PadicNumber) -> bool:
        """Membership test; raises when the known digits cannot decide it."""
        d = x - self.center
        if d.unit != 0:
            return d.valuation >= self.radius_val
        if d.abs_precision >= self.radius_val:
            return True
        raise IndistinguishableAtPrecision(
            f"point known too coarsely to decide membership in {self}"
        )

    def relation(self, other: "Ball") -> str:
        """One of 'equal', 'subset', 'superset', 'disjoint' (ultrametric dichotomy)."""
        if other.prime != self.prime:
            raise ValueError("balls over different primes are incomparable")
        r1, r2 = self.radius_val, other.radius_val
        coarse = min(r1, r2)
        same_class = reduce_fraction_mod(
            self.center_residue - other.center_residue, self.prime, coarse
        ) == 0
        if not same_class:
            return "disjoint"
        if r1 == r2:
            return "equal"
        return "superset" if r1 < r2 else "subset"

    def __str__(self) -> str:
        return f"Ball(p={self.prime}, center={self.center_residue}, r={self.radius_val})"

    __repr__ = __str__


def between(z: PadicNumber, x: PadicNumber, y: PadicNumber) -> bool:
    """Whether z lies in the smallest ball containing x and y."""
    d_xy = x - y
    if d_xy.unit == 0:
        raise IndistinguishableAtPrecision(
            "x and y agree on all known digits, no smallest ball exists at this precision"
        )
    r = d_xy.valuation
    d_zx = z - x
    if d_zx.unit != 0:
        return d_zx.valuation >= r
    if d_zx.abs_precision >= r:
        return True
    raise IndistinguishableAtPrecision(
        f"z - x known only mod p^{d_zx.abs_precision}, cannot compare with v = {r}"
    )


def smallest_ball_containing(x: PadicNumber, y: PadicNumber) -> Ball:
    """The smallest ball containing both x and y (requires x != y at precision)."""
    d = x - y
    if d.unit == 0:
        raise IndistinguishableAtPrecision(
            "x and y agree on all known digits, no smallest ball exists at this precision"
        )
    return Ball(x.prime, x, d.valuation)


def enumerate_ball(ball: Ball, k: int, budget: int = DEFAULT_BUDGET) -> list[Fraction]:
    """All residues of the ball mod p^k, as canonical rationals, ascending.

    There are exactly p**(k - radius_val) of them, each congruent to the
    center mod p^radius_val.
    """
    r = ball.radius_val
    if k < r:
        raise ValueError(f"k = {k} must be at least the radius valuation {r}")
    count = ball.prime ** (k - r)
    if count > budget:
        raise BudgetExceeded(f"{count} residues exceed the budget of {budget}")
    base = ball.center_residue
    step = Fraction(ball.prime) ** r
    return [base + j * step for j in range(count)]


def subdivide(ball: Ball, depth: int = 1, budget: int = DEFAULT_BUDGET) -> list[Ball]:
    """The p**depth disjoint sub-balls of radius valuation radius_val + depth."""
    if depth < 1:
        raise ValueError("depth must be positive")
    r = ball.radius_val
    p = ball.prime
    return [
        Ball(p, _capped(res, p, r + depth), r + depth)
        for res in enumerate_ball(ball, r + depth, budget=budget)
    ]


def padic_from_residue(res: Fraction, prime: int, abs_precision: int) -> PadicNumber:
    """The element 'res known modulo p^abs_precision'."""
    return _capped(Fraction(res), prime, abs_precision)
