"""Parameter bundles for the counting protocols, derived with exact arithmetic."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

from .errors import InfeasibleParameterError
from .exactmath import (
    Interval,
    certified_ceil,
    floor_log,
    ln_bounds,
    log_ratio_bounds,
    mul_intervals,
    smallest_exponent,
)


@dataclass(frozen=True)
class Reduction:
    """Divisors applied to p, the block count and c for exploratory runs."""

    p_div: int = 1
    b_div: int = 1
    c_div: int = 1

    def __post_init__(self) -> None:
        if min(self.p_div, self.b_div, self.c_div) < 1:
            raise ValueError("reduction divisors must be >= 1")

    @property
    def is_identity(self) -> bool:
        return self.p_div == self.b_div == self.c_div == 1


@dataclass(frozen=True)
class RmcParams:
    k: int
    ell: int
    T: int
    epsilon: int
    d: int
    p: int
    r: int
    b: int
    tau: Fraction
    c: int
    alpha: int
    beta: int
    gamma: int
    delta: int
    i_min: Fraction | None = None
    reduced: bool = False

    @property
    def scale(self) -> int:
        return self.d**self.c

    @property
    def epoch_rounds(self) -> int:
        return self.p * self.r + self.d

    def acceptance_range(self) -> tuple[Fraction, Fraction]:
        slack = Fraction(1, self.k**self.gamma)
        base = self.k - self.ell
        return base * (1 - slack), base * (1 + slack)

    def summary(self) -> dict:
        return {
            "k": self.k, "d": self.d, "p": self.p, "r": self.r, "b": self.b, "c": self.c,
            "tau": str(self.tau), "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma,
            "delta": self.delta, "epsilon": self.epsilon, "reduced": self.reduced,
        }


def _zeta_bounds(k: int, epsilon: int, bits: int) -> Interval:
    """Enclose 5 + 2*eps - 2*log_k(k^eps - 1)."""
    lo, hi = log_ratio_bounds(k**epsilon - 1, k, bits)
    return 5 + 2 * epsilon - 2 * hi, 5 + 2 * epsilon - 2 * lo


def rmc_exponents(k: int, T: int, epsilon: int) -> tuple[int, int, int, int]:
    """Smallest integers alpha, beta, gamma, delta meeting the side conditions."""
    d = 2 * k ** (1 + epsilon)
    gamma = smallest_exponent(k, d - 1, strict=True)
    kg = k**gamma
    delta = smallest_exponent(k, Fraction(d * kg, kg + 1 - d), strict=True)
    alpha = max(smallest_exponent(k, 3 * k ** (1 + gamma), strict=False),
                smallest_exponent(k, 3 * T, strict=False))
    beta = smallest_exponent(k, max(d * (2 * k**delta + 1), 3 * T), strict=False)
    return alpha, beta, gamma, delta


@lru_cache(maxsize=1024)
def derive_rmc_params(k: int, ell: int, T: int, epsilon: int = 1,
                      i_min: Fraction | None = None,
                      reduction: Reduction | None = None) -> RmcParams:
    """Minimal parameter bundle for one estimate k.

    The node count appearing in the block formulas is unknown to the nodes and
    is replaced by the current estimate k. Without an isoperimetric hint the
    bound i_min >= 2/k is used.
    """
    if ell < 1 or k < ell + 1:
        raise InfeasibleParameterError(f"need k >= ell + 1 >= 2 (k={k}, ell={ell})")
    if T < 1:
        raise InfeasibleParameterError("T must be >= 1")
    if not isinstance(epsilon, int) or epsilon < 1:
        raise InfeasibleParameterError("epsilon must be a positive integer so d is an integer")
    if i_min is not None and not (0 < Fraction(i_min)):
        raise InfeasibleParameterError("i_min hint must be positive")

    d = 2 * k ** (1 + epsilon)
    alpha, beta, gamma, delta = rmc_exponents(k, T, epsilon)

    # c >= 2T + 4 + max{5 beta, alpha + zeta}; the only irrational term is
    # -2 log_k(k^eps - 1), whose ceiling is -floor(2 log_k(k^eps - 1)).
    two_log = floor_log(k, (k**epsilon - 1) ** 2)
    c = 2 * T + 4 + max(5 * beta, alpha + 5 + 2 * epsilon - two_log)

    ratio = max(Fraction(gamma) / (Fraction(1, k) + Fraction(1, k**alpha)),
                Fraction(delta) / (Fraction(1, d) + Fraction(1, k**beta)))
    p = certified_ceil(lambda bits: mul_intervals(
        ln_bounds(Fraction(k), bits), (2 * ratio / ell, 2 * ratio / ell)))

    if i_min is None:
        factor = Fraction(2) ** (2 * T * (2 + epsilon) - 2) * k ** (2 + 2 * T * (1 + epsilon))
    else:
        factor = Fraction(2) ** (2 * T * (2 + epsilon)) * Fraction(k ** (2 * T * (1 + epsilon))) \
            / Fraction(i_min) ** 2

    def b_bounds(bits: int) -> Interval:
        zlo, zhi = _zeta_bounds(k, epsilon, bits)
        m = (max(alpha, beta, zlo), max(alpha, beta, zhi))
        return mul_intervals(mul_intervals(m, (factor, factor)), ln_bounds(Fraction(k), bits))

    b = certified_ceil(b_bounds)
    tau = ell * (1 - Fraction(ell, k ** (1 + epsilon)))
    params = RmcParams(k=k, ell=ell, T=T, epsilon=epsilon, d=d, p=p, r=T * b, b=b, tau=tau,
                       c=c, alpha=alpha, beta=beta, gamma=gamma, delta=delta,
                       i_min=None if i_min is None else Fraction(i_min))
    check_rmc_conditions(params)
    if reduction is not None and not reduction.is_identity:
        b_red = max(1, -(-b // reduction.b_div))
        params = replace(params, p=max(1, -(-p // reduction.p_div)), b=b_red, r=T * b_red,
                         c=max(2, -(-c // reduction.c_div)), reduced=True)
    return params


def check_rmc_conditions(params: RmcParams) -> None:
    """Re-verify every side condition by exact integer comparison."""
    k, T, d = params.k, params.T, params.d
    a, b, g, dl = params.alpha, params.beta, params.gamma, params.delta
    failures = []
    if d != 2 * k ** (1 + params.epsilon):
        failures.append("d = 2k^(1+eps)")
    if not (k**a >= 3 * k ** (1 + g) and k**a >= 3 * T):
        failures.append("alpha >= max{1+gamma+log_k 3, log_k 3T}")
    if not k**b >= max(d * (2 * k**dl + 1), 3 * T):
        failures.append("beta >= log_k max{d(2k^delta+1), 3T}")
    if not k**g > d - 1:
        failures.append("gamma > log_k(d-1)")
    if not (k**g + 1 - d > 0 and k**dl * (k**g + 1 - d) > d * k**g):
        failures.append("delta > log_k(d k^gamma / (k^gamma + 1 - d))")
    if params.r % T != 0:
        failures.append("r multiple of T")
    if not (params.tau < params.ell and params.p >= 1):
        failures.append("tau < ell and p >= 1")
    two_log = floor_log(k, (k**params.epsilon - 1) ** 2)
    if params.c < 2 * T + 4 + max(5 * b, a + 5 + 2 * params.epsilon - two_log):
        failures.append("c >= 2T + 4 + max{5 beta, zeta + alpha}")
    if failures:
        raise InfeasibleParameterError("violated: " + "; ".join(failures))


@dataclass(frozen=True)
class MultParams:
    n: int
    T: int
    d: int
    c: int
    alpha: int
    b: int
    rounds: int
    phi_min: Fraction
    reduced: bool = False

    @property
    def scale(self) -> int:
        return self.d**self.c

    def summary(self) -> dict:
        return {"n": self.n, "d": self.d, "c": self.c, "alpha": self.alpha, "b": self.b,
                "rounds": self.rounds, "phi_min": str(self.phi_min), "reduced": self.reduced}


@lru_cache(maxsize=256)
def derive_mult_params(n: int, T: int, i_min: Fraction | None = None,
                       reduction: Reduction | None = None) -> MultParams:
    """Minimal multiplicity-counting parameters for n nodes."""
    if n < 2:
        raise InfeasibleParameterError("need n >= 2")
    if T < 1:
        raise InfeasibleParameterError("T must be >= 1")
    d = 2 * n
    alpha = max(3, smallest_exponent(n, 3 * T, strict=False))
    c = 5 * alpha + 2 * T + 4
    if i_min is not None:
        phi_min = Fraction(i_min) / d**T
    else:
        phi_min = Fraction(2, n * d**T)
    coef = 4 * alpha / phi_min**2
    b = certified_ceil(lambda bits: mul_intervals(ln_bounds(Fraction(n), bits), (coef, coef)))
    params = MultParams(n=n, T=T, d=d, c=c, alpha=alpha, b=b, rounds=T * b, phi_min=phi_min)
    if reduction is not None and not reduction.is_identity:
        b_red = max(1, -(-b // reduction.b_div))
        params = replace(params, b=b_red, rounds=T * b_red,
                         c=max(2, -(-c // reduction.c_div)), reduced=True)
    return params


def broadcast_rounds(n: int, T: int, i_min: Fraction | None = None) -> int:
    """ceil(T ln n / ln(1 + i_min)), i.e. the least r with (1+i)^r >= n^T.

    Falls back to i_min = 2/n when no hint is given.
    """
    i = Fraction(2, n) if i_min is None else Fraction(i_min)
    if i <= 0:
        raise InfeasibleParameterError("i_min must be positive")
    if n == 1:
        return 0
    base = 1 + i
    target = Fraction(n) ** T
    lo_r = 0
    hi_r = 1
    while base**hi_r < target:
        lo_r, hi_r = hi_r, hi_r * 2
    while lo_r + 1 < hi_r:
        mid = (lo_r + hi_r) // 2
        if base**mid >= target:
            hi_r = mid
        else:
            lo_r = mid
    return hi_r if base**lo_r < target else lo_r

