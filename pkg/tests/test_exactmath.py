from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from hypothesis import given
from hypothesis import strategies as st

from adcs.exactmath import (
    ceil_log2,
    certified_ceil,
    floor_log,
    ln_bounds,
    mul_intervals,
    smallest_exponent,
)

mpmath.mp.dps = 60


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=10**12))
def test_ln_bounds_enclose_high_precision_log(x):
    lo, hi = ln_bounds(x, 80)
    ref = mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
    assert mpmath.mpf(lo.numerator) / lo.denominator <= ref + mpmath.mpf(10) ** -40
    assert ref <= mpmath.mpf(hi.numerator) / hi.denominator + mpmath.mpf(10) ** -40
    assert hi - lo < Fraction(1, 2**70)


def test_ln_of_one_is_exact():
    assert ln_bounds(Fraction(1)) == (0, 0)


@given(st.integers(2, 50), st.integers(1, 10**9))
def test_smallest_exponent_by_definition(base, x):
    e = smallest_exponent(base, x, strict=False)
    assert base**e >= x and (e == 0 or base ** (e - 1) < x)
    s = smallest_exponent(base, x, strict=True)
    assert base**s > x and (s == 0 or base ** (s - 1) <= x)


def test_floor_log_on_powers():
    assert floor_log(3, 27) == 3
    assert floor_log(3, 26) == 2
    assert floor_log(2, 1) == 0


@given(st.integers(1, 10**30))
def test_ceil_log2(n):
    assert ceil_log2(n) == math.ceil(mpmath.log(n, 2) - mpmath.mpf(10) ** -50)


@given(st.integers(2, 1000), st.fractions(min_value=Fraction(1, 100), max_value=100))
def test_certified_ceil_of_scaled_log(k, coef):
    got = certified_ceil(lambda bits: mul_intervals(ln_bounds(Fraction(k), bits), (coef, coef)))
    ref = mpmath.mpf(coef.numerator) / coef.denominator * mpmath.log(k)
    assert got == int(mpmath.ceil(ref))
