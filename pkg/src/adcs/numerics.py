"""Exact truncated fixed-point potentials.

A potential is stored as a non-negative integer numerator over d^c. The share
a neighbor receives is floor(d^(c-1) * phi) / d^c, which at numerator level is
simply ``numerator // d``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegreeOverflowError, ScaleMismatchError

_POTENTIAL_RE = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*\^\s*(\d+)\s*$")


@dataclass(frozen=True)
class FixedPointParams:
    d: int
    c: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"share denominator must be >= 2, got {self.d}")
        if self.c < 2:
            raise ValueError(f"truncation exponent must be >= 2, got {self.c}")

    @property
    def scale(self) -> int:
        return self.d**self.c


@dataclass(frozen=True, order=True)
class Potential:
    numerator: int
    d: int
    c: int

    def __post_init__(self) -> None:
        if self.numerator < 0:
            raise ValueError("potentials are non-negative")

    @classmethod
    def of(cls, value: Fraction | int, params: FixedPointParams) -> Potential:
        """Exact conversion; the value must be a multiple of d^-c."""
        scaled = Fraction(value) * params.scale
        if scaled.denominator != 1:
            raise ValueError(f"{value} is not a multiple of 1/{params.d}^{params.c}")
        return cls(int(scaled), params.d, params.c)

    @classmethod
    def parse(cls, text: str) -> Potential:
        m = _POTENTIAL_RE.match(text)
        if m is None:
            raise ValueError(f"not a potential string: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)), int(m.group(3)))

    @property
    def params(self) -> FixedPointParams:
        return FixedPointParams(self.d, self.c)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.d**self.c)

    def same_scale(self, other: Potential | FixedPointParams) -> bool:
        return (self.d, self.c) == (other.d, other.c)

    def __add__(self, other: Potential) -> Potential:
        _check_scale(self, other)
        return Potential(self.numerator + other.numerator, self.d, self.c)

    def __str__(self) -> str:
        return format_potential(self.numerator, self.d, self.c)


def format_potential(numerator: int, d: int, c: int) -> str:
    return f"{numerator}/{d}^{c}"


def _check_scale(phi: Potential, params: Potential | FixedPointParams) -> None:
    if not phi.same_scale(params):
        raise ScaleMismatchError(
            f"potential at scale {phi.d}^{phi.c} used with scale {params.d}^{params.c}"
        )


def truncate_share(phi: Potential, params: FixedPointParams) -> Potential:
    """floor(d^(c-1) * phi) / d^c, the amount one neighbor receives."""
    _check_scale(phi, params)
    return Potential(phi.numerator // params.d, params.d, params.c)


def update_numerator(own: int, received: Iterable[int], d: int) -> int:
    """Integer core of the update rule at scale d^c.

    Shared by every protocol so the reference engine and the accelerated
    executor agree on a single definition.
    """
    gained = 0
    count = 0
    for v in received:
        gained += v // d
        count += 1
    return own + gained - count * (own // d)


def potential_update(
    phi: Potential,
    received: Sequence[Potential],
    params: FixedPointParams,
    strict: bool = False,
) -> Potential:
    """phi + sum of truncated neighbor shares - |N| * own truncated share."""
    _check_scale(phi, params)
    for other in received:
        _check_scale(other, params)
    if strict and 2 * len(received) >= params.d:
        raise DegreeOverflowError(
            f"{len(received)} neighbors with d={params.d} (need |N| < d/2)"
        )
    num = update_numerator(phi.numerator, (p.numerator for p in received), params.d)
    return Potential(num, params.d, params.c)


def round_update(
    numerators: Sequence[int], adjacency: Sequence[Sequence[int]], d: int
) -> list[int]:
    """Apply the update simultaneously at every node for one round."""
    return [
        update_numerator(numerators[u], (numerators[v] for v in adjacency[u]), d)
        for u in range(len(numerators))
    ]


def potential_bits(numerator: int) -> int:
    """Width of the minimal big-endian byte encoding of a numerator."""
    return 8 * max(1, (numerator.bit_length() + 7) // 8)
