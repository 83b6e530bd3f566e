from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

from adcs.errors import InfeasibleParameterError
from adcs.params import (
    Reduction,
    broadcast_rounds,
    derive_mult_params,
    derive_rmc_params,
)

mpmath.mp.dps = 60


def mpf(x: Fraction | int):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def least_above(val, strict: bool) -> int:
    """Independent route: floating logarithm at 60 digits, snapped near integers."""
    f = mpmath.floor(val)
    if abs(val - mpmath.nint(val)) < mpmath.mpf(10) ** -40:
        n = int(mpmath.nint(val))
        return n + 1 if strict else n
    return int(f) + 1


def reference_rmc(k: int, ell: int, T: int, eps: int, i_min: Fraction | None = None) -> dict:
    logk = lambda x: mpmath.log(mpf(x)) / mpmath.log(k)  # noqa: E731
    d = 2 * k ** (1 + eps)
    gamma = max(0, least_above(logk(d - 1), strict=True))
    kg = k**gamma
    delta = least_above(logk(Fraction(d * kg, kg + 1 - d)), strict=True)
    alpha = max(least_above(1 + gamma + logk(3), False), least_above(logk(3 * T), False))
    beta = least_above(logk(max(d * (2 * k**delta + 1), 3 * T)), False)
    zeta = 5 + 2 * eps - 2 * logk(k**eps - 1)
    c = 2 * T + 4 + max(5 * beta, int(mpmath.ceil(alpha + zeta - mpmath.mpf(10) ** -40)))
    ratio = max(gamma / (mpf(Fraction(1, k)) + mpf(Fraction(1, k**alpha))),
                delta / (mpf(Fraction(1, d)) + mpf(Fraction(1, k**beta))))
    p = int(mpmath.ceil(2 * mpmath.log(k) / ell * ratio))
    m = max(alpha, beta, zeta)
    if i_min is None:
        b = m * mpmath.mpf(2) ** (2 * T * (2 + eps) - 2) * mpmath.mpf(k) ** (2 + 2 * T * (1 + eps))
    else:
        b = m * mpmath.mpf(2) ** (2 * T * (2 + eps)) * mpmath.mpf(k) ** (2 * T * (1 + eps)) / mpf(i_min) ** 2
    b = int(mpmath.ceil(b * mpmath.log(k)))
    return dict(d=d, gamma=gamma, delta=delta, alpha=alpha, beta=beta, c=c, p=p, b=b, r=T * b)


@pytest.mark.parametrize("k", range(2, 13))
@pytest.mark.parametrize("T", [1, 2, 3])
@pytest.mark.parametrize("eps", [1, 2])
def test_rmc_params_match_independent_route(k, T, eps):
    ell = 1
    got = derive_rmc_params(k, ell, T, eps)
    ref = reference_rmc(k, ell, T, eps)
    assert {key: getattr(got, key) for key in ref} == ref


@pytest.mark.parametrize("i_min", [Fraction(1, 2), Fraction(2, 3), Fraction(1)])
def test_rmc_params_with_hint_match_independent_route(i_min):
    got = derive_rmc_params(5, 2, 2, 1, i_min)
    ref = reference_rmc(5, 2, 2, 1, i_min)
    assert {key: getattr(got, key) for key in ref} == ref


def test_rmc_hand_values():
    p = derive_rmc_params(2, 1, 1)
    assert (p.tau, p.d, p.c, p.p, p.r) == (Fraction(3, 4), 8, 66, 78, 8518)
    assert derive_rmc_params(4, 1, 1).d == 32
    p8 = derive_rmc_params(8, 1, 1)
    assert (p8.c, p8.p, p8.r) == (36, 1597, 52_330_860)


@pytest.mark.parametrize("k, ell", [(k, e) for k in range(2, 10) for e in (1, 2, 3) if e < k])
def test_rmc_structural_conditions(k, ell):
    p = derive_rmc_params(k, ell, 2)
    assert p.r % p.T == 0 and p.tau < p.ell
    lo, hi = p.acceptance_range()
    assert lo < k - ell < hi


def test_rmc_rejects_bad_inputs():
    with pytest.raises(InfeasibleParameterError):
        derive_rmc_params(2, 2, 1)
    with pytest.raises(InfeasibleParameterError):
        derive_rmc_params(3, 1, 1, epsilon=0)
    with pytest.raises(InfeasibleParameterError):
        derive_rmc_params(3, 1, 1, i_min=Fraction(0))


def test_reduced_params_are_flagged():
    full = derive_rmc_params(3, 1, 1)
    red = derive_rmc_params(3, 1, 1, reduction=Reduction(8, 1000, 2))
    assert red.reduced and not full.reduced
    assert red.p < full.p and red.r < full.r and red.c < full.c


def reference_mult(n: int, T: int, i_min: Fraction | None = None) -> dict:
    d = 2 * n
    alpha = max(3, least_above(mpmath.log(3 * T) / mpmath.log(n), False))
    phi = mpf(i_min) / d**T if i_min is not None else mpmath.mpf(2) / (n * d**T)
    b = int(mpmath.ceil(4 * alpha * mpmath.log(n) / phi**2))
    return dict(d=d, alpha=alpha, c=5 * alpha + 2 * T + 4, b=b, rounds=T * b)


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("T", [1, 2, 3])
def test_mult_params_match_independent_route(n, T):
    got = derive_mult_params(n, T)
    ref = reference_mult(n, T)
    assert {key: getattr(got, key) for key in ref} == ref


def test_mult_hand_values():
    p = derive_mult_params(2, 1)
    assert p.d >= 4 and p.alpha == 3 and p.c == 21 and p.b == 134
    assert derive_mult_params(8, 2).rounds == 52_330_860


def test_mult_with_hint():
    got = derive_mult_params(6, 2, Fraction(1, 3))
    assert {k: getattr(got, k) for k in ("b", "rounds")} == \
        {k: v for k, v in reference_mult(6, 2, Fraction(1, 3)).items() if k in ("b", "rounds")}


def test_broadcast_rounds_fallback():
    assert [broadcast_rounds(n, 1) for n in range(2, 9)] == [1, 3, 4, 5, 7, 8, 10]


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("T", [1, 2])
@pytest.mark.parametrize("i_min", [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2)])
def test_broadcast_rounds_is_certified_ceiling(n, T, i_min):
    ref = T * mpmath.log(n) / mpmath.log(1 + mpf(i_min))
    assert broadcast_rounds(n, T, i_min) == least_above(ref, strict=False)
