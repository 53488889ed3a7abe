"""Gaussian-channel exponents: single-user spherical-shell bounds, the
Poltyrev exponent, Gallager's MAC upper bound and the distributed-nesting
exponent of nested lattice codes.

SNRs are linear (A = P/N) and rates are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import MacexpError

THETA_MIN = 1e-9


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def gaussian_capacity(snr: float) -> float:
    return 0.5 * math.log1p(snr)


def gaussian_gamma(snr: float) -> float:
    a = snr
    return 0.5 * (1.0 + a / 2.0 + math.sqrt(1.0 + a * a / 4.0))


def gaussian_critical_rate(snr: float) -> float:
    _check_snr(snr)
    return 0.5 * math.log(gaussian_gamma(snr))


def gaussian_expurgation_rate(snr: float) -> float:
    _check_snr(snr)
    return 0.5 * math.log(gaussian_gamma(snr) - snr / 4.0)


def _check_snr(snr):
    if not snr > 0:
        raise MacexpError(f"SNR must be positive, got {snr}")


def _check_rate(rate):
    if rate < 0:
        raise MacexpError(f"rate must be >= 0, got {rate}")


def _rc_above_critical(rate: float, snr: float) -> float:
    a = snr
    beta = math.exp(2.0 * rate)
    root = math.sqrt(1.0 + 4.0 * beta / (a * (beta - 1.0)))
    first = a / (4.0 * beta) * ((beta + 1.0) - (beta - 1.0) * root)
    second = 0.5 * math.log(beta - a * (beta - 1.0) / 2.0 * (root - 1.0))
    return first + second


def _rc_below_critical(rate: float, snr: float) -> float:
    a = snr
    g = gaussian_gamma(a)
    return 1.0 - g + a / 2.0 + 0.5 * math.log(g - a / 2.0) + 0.5 * math.log(g) - rate


def su_gaussian_random_coding(rate: float, snr: float) -> float:
    """Random-coding exponent of the power-constrained AWGN channel."""
    _check_rate(rate)
    _check_snr(snr)
    if rate >= gaussian_capacity(snr):
        return 0.0
    if rate >= gaussian_critical_rate(snr):
        return max(_rc_above_critical(rate, snr), 0.0)
    return _rc_below_critical(rate, snr)


def su_gaussian_expurgated(rate: float, snr: float) -> float:
    """Expurgated exponent of the AWGN channel.

    The closed form (A/4)(1 - sqrt(1 - exp(-2R))) holds up to R_ex, where it
    touches the rho = 1 line E_0(1) - R with slope -1.  Above R_ex the best
    rho >= 1 is rho = 1, so the exponent continues along that line.
    """
    _check_rate(rate)
    _check_snr(snr)
    if rate > gaussian_expurgation_rate(snr):
        return max(_rc_below_critical(rate, snr), 0.0)
    return snr / 4.0 * (1.0 - math.sqrt(-math.expm1(-2.0 * rate)))


def su_gaussian_best(rate: float, snr: float) -> float:
    return max(su_gaussian_random_coding(rate, snr), su_gaussian_expurgated(rate, snr))


# --- Poltyrev ---------------------------------------------------------------

def _branch(i: int, mu: float) -> float:
    if i == 0:
        return 0.0
    if i == 1:
        return 0.5 * ((mu - 1.0) - math.log(mu))
    if i == 2:
        return 0.5 * math.log(math.e * mu / 4.0)
    if i == 3:
        return mu / 8.0
    raise IndexError(i)


def poltyrev_branch(i: int, mu: float) -> float:
    """Branch ``i`` (0..3) of the Poltyrev exponent, evaluated anywhere."""
    return _branch(i, mu)


def poltyrev_exponent(mu: float) -> float:
    """E_P(mu): 0 up to 1, then the three curved/linear pieces with knees at 2 and 4."""
    if mu < 0 or math.isnan(mu):
        raise MacexpError(f"mu must be >= 0, got {mu}")
    if mu <= 1.0:
        return 0.0
    if mu <= 2.0:
        return _branch(1, mu)
    if mu < 4.0:
        return _branch(2, mu)
    return _branch(3, mu)


# --- MAC ----------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianMacParams:
    a1: float
    a2: float
    r1: float = 0.0
    r2: float = 0.0

    def __post_init__(self):
        if not (self.a2 > 0 and self.a1 >= self.a2):
            raise MacexpError(f"need a1 >= a2 > 0, got a1={self.a1}, a2={self.a2}")
        if self.r1 < 0 or self.r2 < 0:
            raise MacexpError("rates must be >= 0")


def distributed_nesting_exponent(p: GaussianMacParams) -> tuple[float, float, float]:
    """Exponent of the nested-lattice code pair: E_P(min(mu1, mu2)).

    mu1 = A1 exp(-2(R1+R2)),  mu2 = A2 exp(-2 R2).
    """
    mu1 = p.a1 * math.exp(-2.0 * (p.r1 + p.r2))
    mu2 = p.a2 * math.exp(-2.0 * p.r2)
    return poltyrev_exponent(min(mu1, mu2)), mu1, mu2


def r_struct_contains(p: GaussianMacParams) -> bool:
    """R1 + R2 <= log(A1)/2 and R2 <= log(A2)/2."""
    return (p.r1 + p.r2 <= 0.5 * math.log(p.a1)) and (p.r2 <= 0.5 * math.log(p.a2))


@dataclass(frozen=True)
class GallagerUbState:
    rho: float
    theta1: float
    theta2: float
    value: float


def spherical_ub_objective(rho, theta1, theta2, rate_sum, a1, a2):
    """The bracketed expression of Gallager's spherical-shell MAC bound."""
    return ((1.0 + rho) * math.log(math.e * math.sqrt(theta1 * theta2) / (1.0 + rho))
            - (theta1 + theta2) / 2.0
            + rho / 2.0 * math.log(1.0 + a1 / theta1 + a2 / theta2)
            - rho * rate_sum)


def _theta_opt(rho: float, a1: float, a2: float, start=None):
    """max over theta in (0, 1+rho]^2 of the rate-free part; returns (value, t1, t2)."""
    hi = 1.0 + rho
    c = (1.0 + rho) * (1.0 - math.log(1.0 + rho))

    def f_vec(t1, t2):
        return (c + (1.0 + rho) * 0.5 * (np.log(t1) + np.log(t2)) - (t1 + t2) / 2.0
                + rho / 2.0 * np.log(1.0 + a1 / t1 + a2 / t2))

    grid = np.geomspace(1e-6, hi, 80)
    vals = f_vec(grid[:, None], grid[None, :])
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    x0 = np.array([grid[i], grid[j]])
    if start is not None:
        if f_vec(*start) > vals[i, j]:
            x0 = np.array(start)

    def neg(x):
        t1, t2 = x
        h = 1.0 + a1 / t1 + a2 / t2
        v = f_vec(t1, t2)
        g1 = (1.0 + rho) / (2.0 * t1) - 0.5 - rho / 2.0 * (a1 / t1**2) / h
        g2 = (1.0 + rho) / (2.0 * t2) - 0.5 - rho / 2.0 * (a2 / t2**2) / h
        return -v, -np.array([g1, g2])

    res = minimize(neg, x0, jac=True, method="L-BFGS-B",
                   bounds=[(THETA_MIN, hi), (THETA_MIN, hi)],
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500})
    t1, t2 = res.x
    v = float(f_vec(t1, t2))
    if v < vals[i, j]:
        v, t1, t2 = float(vals[i, j]), grid[i], grid[j]
    return v, float(t1), float(t2)


@lru_cache(maxsize=64)
def _rho_profile(a1: float, a2: float):
    rhos = np.linspace(0.0, 1.0, 65)
    prof = [_theta_opt(r, a1, a2) for r in rhos]
    return rhos, prof


def gallager_spherical_ub(rate_sum: float, a1: float, a2: float) -> tuple[float, GallagerUbState]:
    """Gallager's upper bound on the spherical-shell MAC exponent at sum rate R.

    The theta maximisation does not depend on R, so the inner profile
    max_theta f(rho, theta) is computed once per SNR pair on a 65-point rho
    grid; the best grid rho is then refined by bounded Brent search.
    """
    _check_rate(rate_sum)
    _check_snr(a1)
    _check_snr(a2)
    rhos, prof = _rho_profile(float(a1), float(a2))
    vals = np.array([p[0] for p in prof]) - rhos * rate_sum
    k = int(np.argmax(vals))
    best = GallagerUbState(float(rhos[k]), prof[k][1], prof[k][2], float(vals[k]))
    lo, hi = rhos[max(k - 1, 0)], rhos[min(k + 1, len(rhos) - 1)]

    def neg(r):
        return -(_theta_opt(r, a1, a2, start=(prof[k][1], prof[k][2]))[0] - r * rate_sum)

    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    if -res.fun > best.value:
        v, t1, t2 = _theta_opt(res.x, a1, a2, start=(prof[k][1], prof[k][2]))
        best = GallagerUbState(float(res.x), t1, t2, v - res.x * rate_sum)
    value = max(best.value, 0.0)
    return value, best
