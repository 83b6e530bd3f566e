"""Certified rational bounds for logarithms and the ceilings built from them.

Every real quantity that feeds a protocol parameter is enclosed in a rational
interval; a ceiling is only reported once both interval ends agree on it.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable

Interval = tuple[Fraction, Fraction]

DEFAULT_BITS = 96
MAX_BITS = 4096


def _atanh_bounds(z: Fraction, bits: int) -> Interval:
    """Enclose atanh(z) for 0 <= z <= 1/3 using the odd power series.

    The tail after the last term is bounded by a geometric series in z^2.
    """
    if z == 0:
        return Fraction(0), Fraction(0)
    eps = Fraction(1, 1 << bits)
    z2 = z * z
    term = z
    total = Fraction(0)
    j = 0
    while True:
        total += term / (2 * j + 1)
        term *= z2
        j += 1
        tail = term / ((2 * j + 1) * (1 - z2))
        if tail < eps:
            return total, total + tail


@lru_cache(maxsize=64)
def _ln2_bounds(bits: int) -> Interval:
    lo, hi = _atanh_bounds(Fraction(1, 3), bits + 4)
    return 2 * lo, 2 * hi


@lru_cache(maxsize=4096)
def ln_bounds(x: Fraction, bits: int = DEFAULT_BITS) -> Interval:
    """Return (lo, hi) with lo <= ln(x) <= hi and hi - lo on the order of 2^-bits."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("logarithm of a non-positive number")
    if x == 1:
        return Fraction(0), Fraction(0)
    # x = 2^e * m with m in [1, 2), then ln m = 2 atanh((m-1)/(m+1)) with the argument <= 1/3
    e = x.numerator.bit_length() - x.denominator.bit_length()
    m = x / Fraction(2) ** e
    if m < 1:
        m *= 2
        e -= 1
    extra = max(1, abs(e)).bit_length() + 2
    l2lo, l2hi = _ln2_bounds(bits + extra)
    alo, ahi = _atanh_bounds((m - 1) / (m + 1), bits + 2)
    if e >= 0:
        return e * l2lo + 2 * alo, e * l2hi + 2 * ahi
    return e * l2hi + 2 * alo, e * l2lo + 2 * ahi


def mul_intervals(a: Interval, b: Interval) -> Interval:
    products = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return min(products), max(products)


def div_intervals(a: Interval, b: Interval) -> Interval:
    if b[0] <= 0 <= b[1]:
        raise ZeroDivisionError("divisor interval contains zero")
    return mul_intervals(a, (1 / b[1], 1 / b[0]))


def certified_ceil(enclose: Callable[[int], Interval], bits: int = DEFAULT_BITS) -> int:
    """Ceiling of a real given by an enclosure function of the working precision.

    Precision doubles until the interval ends share a ceiling. If the value
    sits on an integer the enclosure can never separate, the upper ceiling is
    returned, which is the conservative choice for every caller here.
    """
    while True:
        lo, hi = enclose(bits)
        if math.ceil(lo) == math.ceil(hi) or bits >= MAX_BITS:
            return math.ceil(hi)
        bits *= 2


def certified_floor(enclose: Callable[[int], Interval], bits: int = DEFAULT_BITS) -> int:
    while True:
        lo, hi = enclose(bits)
        if math.floor(lo) == math.floor(hi) or bits >= MAX_BITS:
            return math.floor(lo)
        bits *= 2


def smallest_exponent(base: int, x: Fraction | int, strict: bool) -> int:
    """Smallest integer e with base^e > x (strict) or base^e >= x.

    Decided by exact integer powering, so a strict logarithmic inequality is
    never under-satisfied by rounding.
    """
    if base < 2:
        raise ValueError("base must be at least 2")
    x = Fraction(x)
    if x <= 0:
        raise ValueError("argument must be positive")

    def ok(e: int) -> bool:
        power = Fraction(base) ** e
        return power > x if strict else power >= x

    e = 0
    if ok(0):
        while ok(e - 1):
            e -= 1
        return e
    while not ok(e):
        e += 1
    return e


def floor_log(base: int, x: Fraction | int) -> int:
    """Largest integer e with base^e <= x."""
    return smallest_exponent(base, x, strict=True) - 1


def ceil_log2(n: int) -> int:
    """Exact ceil(log2 n) for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return (n - 1).bit_length()


def log_ratio_bounds(x: Fraction | int, base: int, bits: int) -> Interval:
    """Enclose log_base(x) = ln x / ln base."""
    return div_intervals(ln_bounds(Fraction(x), bits), ln_bounds(Fraction(base), bits))
