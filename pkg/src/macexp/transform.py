"""Dithered modulo transformation of a discrete MAC into a virtual additive MAC.

Each encoder adds a uniform dither U_i to its virtual input V_i over Z_m,
maps the result through a precoder f_i and sends it.  The decoder estimates
S = k1 X'1 + k2 X'2 by g(Y) and removes the dithers.  The estimation error
N = g(Y) - S is independent of (V1, V2), so the resulting channel is
Y' = k1 V1 + k2 V2 + N.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._modp import is_prime
from .channels import AdditiveNoiseChannel, Mac2, Pmf
from .errors import IndependenceViolation, MacexpError, NonPrimeModulus
from .su_exponents import best_known_exponent

INDEPENDENCE_TOL = 1e-12
MAX_SEARCH_MODULUS = 97


@dataclass(frozen=True)
class TransformSpec:
    m: int
    f1: tuple
    f2: tuple
    k1: int
    k2: int
    g: tuple

    def __post_init__(self):
        for name in ("f1", "f2", "g"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if not is_prime(self.m):
            raise NonPrimeModulus(f"m={self.m} is not prime")
        if len(self.f1) != self.m or len(self.f2) != self.m:
            raise MacexpError("precoders must be defined on all of Z_m")
        if self.k1 % self.m == 0 or self.k2 % self.m == 0:
            raise MacexpError("k1 and k2 must be nonzero mod m")
        if any(not 0 <= v < self.m for v in self.g):
            raise MacexpError("estimator values must lie in Z_m")

    @classmethod
    def identity(cls, m: int = 2) -> "TransformSpec":
        ident = tuple(range(m))
        return cls(m, ident, ident, 1, 1, ident)

    def check_against(self, mac: Mac2) -> None:
        if len(self.g) != mac.output_size:
            raise MacexpError("estimator must be defined on the whole output alphabet")
        if max(self.f1) >= mac.input1_size or max(self.f2) >= mac.input2_size:
            raise MacexpError("precoder maps outside the MAC input alphabet")

    def key(self) -> tuple:
        return (self.f1, self.f2, self.k1, self.k2, self.g)

    def to_json(self) -> dict:
        return {"m": self.m, "f1": list(self.f1), "f2": list(self.f2),
                "k1": self.k1, "k2": self.k2, "g": list(self.g)}

    @classmethod
    def from_json(cls, doc) -> "TransformSpec":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["m"], doc["f1"], doc["f2"], doc["k1"], doc["k2"], doc["g"])


@dataclass(frozen=True)
class VirtualChannel:
    m: int
    noise: Pmf
    coefficients: tuple
    max_dependence: float = 0.0

    def associated(self) -> AdditiveNoiseChannel:
        return AdditiveNoiseChannel(self.m, self.noise)


def _noise_law(mac: Mac2, spec: TransformSpec) -> np.ndarray:
    # X'_i uniform and independent of V_i: enumerate (X'1, X'2) directly
    m = spec.m
    g = np.array(spec.g)
    noise = np.zeros(m)
    for a in range(m):
        for b in range(m):
            s = (spec.k1 * a + spec.k2 * b) % m
            np.add.at(noise, (g - s) % m, mac.table[spec.f1[a], spec.f2[b]])
    return noise / (m * m)


def _dependence(mac: Mac2, spec: TransformSpec, noise: np.ndarray) -> float:
    """max |Pr(Y' = y' | v1, v2) - Pr(N = y' - k1 v1 - k2 v2)| over everything.

    Enumerates both dithers explicitly, so it checks the whole chain
    dither -> precoder -> channel -> estimator -> dither removal.
    """
    m = spec.m
    g = np.array(spec.g)
    worst = 0.0
    for v1 in range(m):
        for v2 in range(m):
            law = np.zeros(m)
            for u1 in range(m):
                for u2 in range(m):
                    x1, x2 = (v1 + u1) % m, (v2 + u2) % m
                    out = (g - (spec.k1 * u1 + spec.k2 * u2)) % m  # Y' per channel output
                    np.add.at(law, out, mac.table[spec.f1[x1], spec.f2[x2]])
            law /= m * m
            shift = (spec.k1 * v1 + spec.k2 * v2) % m
            expected = np.roll(noise, shift)
            worst = max(worst, float(np.max(np.abs(law - expected))))
    return worst


def apply_transform(mac: Mac2, spec: TransformSpec, check: bool = True) -> VirtualChannel:
    """Virtual additive channel produced by ``spec`` on ``mac``.

    With ``check`` the independence of the virtual noise from the virtual
    inputs is verified by enumerating the dithers; a violation raises
    ``IndependenceViolation``.
    """
    spec.check_against(mac)
    noise = _noise_law(mac, spec)
    dep = 0.0
    if check:
        dep = _dependence(mac, spec, noise)
        if dep > INDEPENDENCE_TOL:
            raise IndependenceViolation(f"virtual noise depends on inputs (dev {dep:.3g})")
    noise = noise / noise.sum()
    return VirtualChannel(spec.m, Pmf(noise), (spec.k1, spec.k2), dep)


def binary_gamma(mac: Mac2) -> float:
    """Average probability that Y differs from X1 xor X2 over the four input pairs."""
    if mac.table.shape != (2, 2, 2):
        raise MacexpError("binary_gamma needs a 2x2x2 MAC")
    t = mac.table
    return float(sum(t[x1, x2, 1 ^ x1 ^ x2] for x1 in range(2) for x2 in range(2)) / 4.0)


def _exponent_of_noise(noise: Pmf, m: int, rate: float) -> float:
    e = best_known_exponent(AdditiveNoiseChannel(m, noise).to_dmc(), rate).e_best
    return max(float(e), 0.0) + 0.0  # no negative zero


def virtual_exponent(mac: Mac2, spec: TransformSpec, rate_sum: float) -> float:
    """Best known single-user exponent of the virtual channel at the sum rate."""
    vc = apply_transform(mac, spec, check=False)
    return _exponent_of_noise(vc.noise, spec.m, rate_sum)


def spec_space_size(mac: Mac2, m: int) -> int:
    return (mac.input1_size ** m * mac.input2_size ** m * (m - 1) ** 2
            * m ** mac.output_size)


def _spec_from_index(mac: Mac2, m: int, idx: int) -> TransformSpec:
    # mixed radix, most significant first: f1, f2, k1, k2, g
    radices = ([mac.input1_size] * m + [mac.input2_size] * m + [m - 1, m - 1]
               + [m] * mac.output_size)
    digits = []
    for r in reversed(radices):
        idx, d = divmod(idx, r)
        digits.append(d)
    digits.reverse()
    f1 = digits[:m]
    f2 = digits[m:2 * m]
    k1, k2 = digits[2 * m] + 1, digits[2 * m + 1] + 1
    g = digits[2 * m + 2:]
    return TransformSpec(m, f1, f2, k1, k2, g)


@dataclass(frozen=True)
class SearchResult:
    spec: TransformSpec
    channel: VirtualChannel
    exponent: float
    evaluated: int
    exhaustive: bool


def search_transform(mac: Mac2, m: int, budget: int = 100_000, seed: int = 0,
                     rate: float = 0.0, tie_tol: float = 1e-12) -> SearchResult:
    """Search transform parameters for the largest virtual exponent at ``rate``.

    Exhaustive (in lexicographic spec order) when the spec space fits in
    ``budget``; otherwise ``budget`` specs are drawn uniformly at random with
    ``seed``.  Exponents within ``tie_tol`` count as equal and the
    lexicographically smallest spec wins.
    """
    if not is_prime(m):
        raise NonPrimeModulus(f"m={m} is not prime")
    if m > MAX_SEARCH_MODULUS:
        raise MacexpError(f"search supports m <= {MAX_SEARCH_MODULUS}")
    if budget < 1:
        raise MacexpError("budget must be >= 1")
    total = spec_space_size(mac, m)
    exhaustive = total <= budget
    if exhaustive:
        indices = range(total)
    else:
        rng = np.random.default_rng(seed)
        indices = sorted(int(i) for i in rng.integers(0, total, size=budget, dtype=np.uint64)) \
            if total < 2**63 else \
            sorted(int.from_bytes(rng.bytes(16), "big") % total for _ in range(budget))

    cache: dict[bytes, float] = {}
    best = None
    count = 0
    for idx in indices:
        spec = _spec_from_index(mac, m, idx)
        noise = _noise_law(mac, spec)
        noise = noise / noise.sum()
        key = np.round(noise, 14).tobytes()
        if key not in cache:
            cache[key] = _exponent_of_noise(Pmf(noise), m, rate)
        e = cache[key]
        count += 1
        if best is None or e > best[0] + tie_tol or (abs(e - best[0]) <= tie_tol and spec.key() < best[1].key()):
            best = (e, spec)
    e, spec = best
    return SearchResult(spec, apply_transform(mac, spec), e, count, exhaustive)
