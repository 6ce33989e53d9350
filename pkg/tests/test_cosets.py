"""Coset tables, n-th power tests, and Hensel lifting against brute force."""

import pytest

from padicalc.core import PadicNumber, vp_int
from padicalc.cosets import (
    build_coset_table,
    classify,
    hensel_exponent,
    hensel_lift,
    is_nth_power,
    nth_root,
    poly_eval,
)
from padicalc.errors import HenselConditionFailed, InsufficientPrecision, OutOfDomain


def brute_force_unit_power(u: int, n: int, p: int, k: int) -> bool:
    """Exhaustive n-th power test for a unit residue, modulo p^k.

    For k >= 2*v_p(n)+1 this decides membership in the n-th powers exactly.
    """
    modulus = p**k
    u %= modulus
    return any(pow(y, n, modulus) == u for y in range(1, modulus) if y % p != 0)


def test_hensel_exponent_examples():
    assert hensel_exponent(3, 2) == 1
    assert hensel_exponent(2, 2) == 3
    assert hensel_exponent(5, 5) == 3


@pytest.mark.parametrize("p,n", [(3, 2), (2, 2), (5, 5), (7, 3), (2, 4), (3, 6)])
def test_hensel_exponent_sufficiency_by_enumeration(p, n):
    # every unit congruent to 1 mod p^m must be an n-th power
    m = hensel_exponent(p, n)
    k = m + 3
    for t in range(p**3):
        u = 1 + p**m * t
        assert brute_force_unit_power(u, n, p, k)


def test_hensel_exponent_minimality_spot_checks():
    # p = 2, n = 2: units that are squares are exactly those congruent to 1 mod 8
    assert not brute_force_unit_power(1 + 2, 2, 2, 6)
    assert not brute_force_unit_power(1 + 4, 2, 2, 6)
    assert brute_force_unit_power(1 + 8, 2, 2, 6)


def test_hensel_lift_fixed_root():
    one = PadicNumber.from_int(1, 7, 10)
    z = hensel_lift([-1, 0, 1], one, 8)
    assert (z - one).is_zero


def test_hensel_lift_sqrt2_mod_7():
    x0 = PadicNumber.from_int(3, 7, 10)
    z = hensel_lift([-2, 0, 1], x0, 5)
    # brute-force square roots of 2 mod 7^5
    roots = [y for y in range(7**5) if y * y % 7**5 == 2]
    assert sorted(roots) == [4567, 7**5 - 4567]
    assert z.residue(5) == 4567  # the root congruent to 3 mod 7
    assert z.digits(5) == [3, 1, 2, 6, 1]


def test_hensel_lift_failure_when_no_root():
    # 2 is not a quadratic residue mod 5
    x0 = PadicNumber.from_int(1, 5, 10)
    with pytest.raises(HenselConditionFailed):
        hensel_lift([-2, 0, 1], x0, 5)


def test_hensel_lift_agrees_with_exhaustive_search():
    # x^3 + x - 5 over Z_5, starting near 0
    p, target = 5, 4
    z = hensel_lift([-5, 1, 0, 1], PadicNumber.zero(p, 8), target)
    value = poly_eval(
        [PadicNumber.from_int(c, p, 12) for c in (-5, 1, 0, 1)],
        PadicNumber.from_fraction(z.residue(target), p, 12),
    )
    assert value.val_lower_bound() >= target
    # unique root in the Hensel ball v(z - x0) > v(f'(x0)) = 0, i.e. z = 0 mod 5
    matches = [
        y for y in range(p**target)
        if (y**3 + y - 5) % p**target == 0 and y % p == 0
    ]
    assert matches == [int(z.residue(target))]


def test_coset_table_examples():
    t = build_coset_table(5, 2)
    assert t.values == (1, 2, 5, 10)
    assert len(t) == 4

    t1 = build_coset_table(3, 1)
    assert t1.values == (1,)

    t2 = build_coset_table(2, 2)
    assert len(t2) == 8
    assert t2.hensel_m == 3
    assert set(t2.unit_reps) == {1, 3, 5, 7}


def test_classify_examples():
    t = build_coset_table(5, 2)
    n8 = lambda x: PadicNumber.from_int(x, 5, 8)
    assert classify(n8(4), t).value == 1
    assert classify(n8(45), t).value == 5
    assert classify(n8(2), t).value == 2


def test_classify_precision_and_domain_errors():
    t = build_coset_table(2, 2)  # needs 3 unit digits
    with pytest.raises(InsufficientPrecision):
        classify(PadicNumber.from_int(3, 2, 2), t)
    with pytest.raises(OutOfDomain):
        classify(PadicNumber.zero(2), t)
    with pytest.raises(InsufficientPrecision):
        classify(PadicNumber.zero(2, 5), t)


def test_is_nth_power_examples():
    assert is_nth_power(PadicNumber.from_int(8, 7, 8), 3) is True
    assert is_nth_power(PadicNumber.from_int(5, 5, 8), 2) is False
    assert is_nth_power(PadicNumber.from_int(7, 3, 8), 2) is True
    assert brute_force_unit_power(7, 2, 3, 6)


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (7, 2), (2, 2), (3, 3), (5, 3), (2, 3)])
def test_partition_property(p, n):
    # every nonzero residue mod p^(m+n) lands in exactly one coset
    t = build_coset_table(p, n)
    k = t.hensel_m + n
    for r in range(1, p**k):
        x = PadicNumber.from_int(r, p, k)  # relative precision k >= m + 1
        if x.valuation + t.hensel_m > k:
            continue  # unit digits below the classification threshold
        label = classify(x, t)
        hits = []
        for idx, lam in enumerate(t.values):
            ratio = x / PadicNumber.from_int(lam, p, k)
            if ratio.valuation % n == 0 and brute_force_unit_power(
                ratio.unit, n, p, t.hensel_m
            ):
                hits.append(idx)
        assert hits == [label.index]


def test_coset_stability_under_power_multiplication():
    import random

    rng = random.Random(11)
    for p, n in [(3, 2), (5, 2), (2, 2), (7, 3)]:
        t = build_coset_table(p, n)
        for _ in range(40):
            a = rng.randint(1, 400)
            w = rng.randint(1, 50)
            x = PadicNumber.from_int(a, p, t.hensel_m + 8)
            tpow = PadicNumber.from_int(w, p, t.hensel_m + 8) ** n
            assert is_nth_power(tpow, n)
            assert classify(x * tpow, t).index == classify(x, t).index


def test_nth_root_branches():
    # 2 has two square roots in Z_7; the branch picks one by its leading digit
    x = PadicNumber.from_int(2, 7, 8)
    r3 = nth_root(x, 2, branch=3)
    r4 = nth_root(x, 2, branch=4)
    assert r3.unit % 7 == 3 and r4.unit % 7 == 4
    assert ((r3 * r3) - x).val_lower_bound() >= 6
    with pytest.raises(OutOfDomain):
        nth_root(x, 2, branch=1)
    with pytest.raises(OutOfDomain):
        nth_root(PadicNumber.from_int(5, 5, 8), 2)


def test_nth_root_even_valuation():
    # unit part 4 has square roots 2 and 5 mod 7
    x = PadicNumber.from_int(2 * 2 * 49, 7, 8)
    r = nth_root(x, 2, branch=2)
    assert r.valuation == 1
    assert ((r * r) - x).val_lower_bound() >= r.abs_precision


def test_hensel_subgroup_membership_via_api():
    for p, n in [(3, 2), (2, 2), (5, 5)]:
        t = build_coset_table(p, n)
        m = t.hensel_m
        for trunc in range(p**3):
            u = PadicNumber.from_int(1 + p**m * trunc, p, m + 3)
            assert is_nth_power(u, n) is True
