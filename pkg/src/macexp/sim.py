"""Monte Carlo harnesses.

* split linear codes over an additive-noise MAC, ML joint decoding, with a
  paired single-user decoder of the parent code fed the same noise;
* the one-dimensional nested PAM construction over the Gaussian MAC.

Randomness: trials are cut into blocks of ``BLOCK`` and block b draws from
``default_rng(SeedSequence([seed, b]))``, so a result depends only on
(seed, trials) and blocks can be run in any order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.stats import norm

from .channels import Pmf
from .errors import InvalidDims, MacexpError, TooLarge
from .linear_codes import SplitCode, all_vectors

BLOCK = 4096
Z95 = 1.959963984540054
MAX_CODEWORDS = 2 ** 16
_CHUNK = 2 ** 22


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int

    def __post_init__(self):
        if int(self.trials) < 1:
            raise MacexpError("trials must be >= 1")
        if int(self.seed) < 0 or int(self.seed) >= 2 ** 64:
            raise MacexpError("seed must be a 64-bit unsigned integer")

    def blocks(self):
        for b, lo in enumerate(range(0, self.trials, BLOCK)):
            size = min(BLOCK, self.trials - lo)
            yield size, np.random.default_rng(np.random.SeedSequence([int(self.seed), b]))


@dataclass(frozen=True)
class SimResult:
    estimate: float
    halfwidth: float
    lo: float
    hi: float
    errors: int
    trials: int
    method: str

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "ci": [self.lo, self.hi],
                "halfwidth": self.halfwidth, "errors": self.errors,
                "trials": self.trials, "ci_method": self.method}


def confidence_interval(errors: int, trials: int, degenerate: bool = False) -> SimResult:
    """95% interval: normal approximation, Wilson score when errors < 10."""
    est = errors / trials
    if degenerate:
        return SimResult(est, 0.0, est, est, errors, trials, "exact")
    if errors >= 10:
        h = Z95 * math.sqrt(est * (1.0 - est) / trials)
        return SimResult(est, h, max(est - h, 0.0), min(est + h, 1.0), errors, trials, "normal")
    z2 = Z95 * Z95
    den = 1.0 + z2 / trials
    centre = (est + z2 / (2 * trials)) / den
    h = Z95 * math.sqrt(est * (1 - est) / trials + z2 / (4 * trials * trials)) / den
    lo, hi = max(centre - h, 0.0), min(centre + h, 1.0)
    if errors == 0:
        lo = 0.0  # exact endpoint, the formula leaves rounding residue
    return SimResult(est, (hi - lo) / 2.0, lo, hi, errors, trials, "wilson")


# --- split linear codes -------------------------------------------------------

class _TypeRanker:
    """Exact likelihood rank of a noise vector from its symbol counts."""

    def __init__(self, noise: Pmf, n: int):
        p = noise.alphabet_size
        fr = [Fraction(float(x)) for x in noise.probs]
        types = []
        for combo in combinations_with_replacement(range(p), n):
            types.append(np.bincount(np.array(combo, dtype=np.int64), minlength=p))
        types = np.array(types, dtype=np.int64).reshape(-1, p)
        probs = [math.prod(fr[a] ** int(c) for a, c in enumerate(t)) for t in types]
        dense = {v: i for i, v in enumerate(sorted(set(probs)))}
        self.base = n + 1
        self.weights = self.base ** np.arange(p, dtype=np.int64)
        keys = types @ self.weights
        order = np.argsort(keys)
        self.keys = keys[order]
        self.ranks = np.array([dense[probs[i]] for i in order], dtype=np.int64)
        self.p = p

    def __call__(self, vectors: np.ndarray) -> np.ndarray:
        counts = np.stack([(vectors == a).sum(axis=-1) for a in range(self.p)], axis=-1)
        return self.ranks[np.searchsorted(self.keys, counts @ self.weights)]


def _sample_noise(rng, noise: Pmf, shape) -> np.ndarray:
    cdf = np.cumsum(noise.probs)
    cdf[-1] = 1.0
    return np.minimum(np.searchsorted(cdf, rng.random(shape), side="right"),
                      noise.alphabet_size - 1)


def _ml_decode(y, codewords, ranker, tie_u):
    """Index of the ML codeword for each row of y; ties resolved by picking the
    floor(u * count)-th maximizer in codeword order."""
    out = np.empty(y.shape[0], dtype=np.int64)
    step = max(1, _CHUNK // (codewords.size or 1))
    for lo in range(0, y.shape[0], step):
        yy = y[lo:lo + step]
        r = ranker((yy[:, None, :] - codewords[None, :, :]) % ranker.p)
        best = r == r.max(axis=1, keepdims=True)
        cnt = best.sum(axis=1)
        pick = np.floor(tie_u[lo:lo + step] * cnt).astype(np.int64)
        cum = np.cumsum(best, axis=1)
        out[lo:lo + step] = np.argmax(best & (cum == pick[:, None] + 1), axis=1)
    return out


@dataclass(frozen=True)
class SplitSimResult:
    joint: SimResult
    user1: SimResult
    user2: SimResult
    parent: SimResult
    mismatches: int  # trials where the split and parent decisions differ

    def to_json(self) -> dict:
        return {"joint": self.joint.to_json(), "user1": self.user1.to_json(),
                "user2": self.user2.to_json(), "parent": self.parent.to_json(),
                "paired_mismatches": self.mismatches}


def simulate_split_mac(sc: SplitCode, noise: Pmf, cfg: SimConfig) -> SplitSimResult:
    """Monte Carlo joint-ML decoding of a split linear code over Y = c1 + c2 + N.

    Per trial: u1, u2 uniform, noise i.i.d. from ``noise``, and one uniform
    used to break exact likelihood ties at random (so the expected error rate
    is the exact probability under the fractional tie rule).  The parent code
    decoder sees the same received word and tie uniform.
    """
    g = sc.parent
    p, n, k = g.p, g.n, g.k
    if noise.alphabet_size != p:
        raise InvalidDims("noise alphabet does not match the code")
    if p ** k > MAX_CODEWORDS:
        raise TooLarge(f"decoder would search {p}^{k} codewords (limit {MAX_CODEWORDS})")
    ranker = _TypeRanker(noise, n)
    # split codewords from the Minkowski sum, indexed by the packed pair (u1, u2)
    m1 = all_vectors(p, sc.k1)
    m2 = all_vectors(p, sc.k2)
    c1 = (m1 @ sc.g1) % p if sc.k1 else np.zeros((1, n), np.int64)
    c2 = (m2 @ sc.g2) % p if sc.k2 else np.zeros((1, n), np.int64)
    split_words = ((c1[:, None, :] + c2[None, :, :]) % p).reshape(-1, n)
    parent_words = (all_vectors(p, k) @ g.rows) % p
    n2 = c2.shape[0]

    err = np.zeros(4, dtype=np.int64)  # joint, user1, user2, parent
    mism = 0
    for size, rng in cfg.blocks():
        u1 = rng.integers(0, c1.shape[0], size)
        u2 = rng.integers(0, n2, size)
        z = _sample_noise(rng, noise, (size, n))
        tie_u = rng.random(size)
        sent = u1 * n2 + u2
        y = (split_words[sent] + z) % p
        d = _ml_decode(y, split_words, ranker, tie_u)
        dp = _ml_decode(y, parent_words, ranker, tie_u)
        err[0] += np.count_nonzero(d != sent)
        err[1] += np.count_nonzero(d // n2 != u1)
        err[2] += np.count_nonzero(d % n2 != u2)
        err[3] += np.count_nonzero(dp != sent)
        mism += np.count_nonzero(d != dp)
    deg = noise.is_degenerate()
    res = [confidence_interval(int(e), cfg.trials, deg) for e in err]
    return SplitSimResult(*res, mismatches=int(mism))


# --- one-dimensional nested PAM -----------------------------------------------

@dataclass(frozen=True)
class PamTriplet:
    """Nested lattices l0 Z in l1 Z in Z, scaled by ``step``."""

    l0: int
    l1: int
    step: float = 1.0

    def __post_init__(self):
        l0, l1 = int(self.l0), int(self.l1)
        if l0 < 1 or l1 < 1 or l0 % 2 == 0 or l1 % 2 == 0:
            raise InvalidDims("l0 and l1 must be odd positive integers")
        if l0 % l1:
            raise InvalidDims("l1 must divide l0")
        if not self.step > 0:
            raise InvalidDims("step must be positive")

    @property
    def n1(self) -> int:
        return self.l0 // self.l1

    def integer_codebooks(self):
        l0, l1 = self.l0, self.l1
        c1 = l1 * np.arange(self.n1, dtype=np.int64) - (l0 - l1) // 2
        c2 = np.arange(l1, dtype=np.int64) - (l1 - 1) // 2
        pam = np.arange(l0, dtype=np.int64) - (l0 - 1) // 2
        return c1, c2, pam


def pam_codebooks(t: PamTriplet):
    """Scaled user codebooks and their sum constellation, as sorted arrays."""
    c1, c2, pam = t.integer_codebooks()
    return c1 * t.step, c2 * t.step, pam * t.step


def pam_sum_is_exact(t: PamTriplet) -> bool:
    """The sum map C1 x C2 -> Z is injective and its image is the centred PAM."""
    c1, c2, pam = t.integer_codebooks()
    sums = (c1[:, None] + c2[None, :]).ravel()
    return sums.size == np.unique(sums).size and np.array_equal(np.sort(sums), pam)


def mean_square(points) -> float:
    return float(np.mean(np.square(points)))


def box_muller(rng, size) -> np.ndarray:
    u1 = 1.0 - rng.random(size)
    u2 = rng.random(size)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def pam_quantize(y, t: PamTriplet) -> np.ndarray:
    """Nearest point of the centred l0-PAM (integer labels); a midpoint goes to
    the point of smaller magnitude."""
    half = (t.l0 - 1) // 2
    x = np.asarray(y, dtype=float) / t.step
    a = np.sign(x) * np.ceil(np.abs(x) - 0.5)
    return np.clip(a, -half, half).astype(np.int64)


def _nearest_pam_point(y, t: PamTriplet) -> np.ndarray:
    # exhaustive nearest-point search, candidates listed by increasing magnitude
    _, _, pam = t.integer_codebooks()
    cand = pam[np.argsort(np.abs(pam), kind="stable")]
    out = np.empty(len(y), dtype=np.int64)
    step = max(1, _CHUNK // cand.size)
    for lo in range(0, len(y), step):
        d = np.abs(y[lo:lo + step, None] - cand[None, :] * t.step)
        out[lo:lo + step] = cand[np.argmin(d, axis=1)]
    return out


def pam_error_oracle(t: PamTriplet, noise_std: float) -> float:
    """2 (L0 - 1)/L0 * Q(step / (2 sigma)) for equiprobable equidistant PAM."""
    return 2.0 * (t.l0 - 1) / t.l0 * norm.sf(t.step / (2.0 * noise_std))


@dataclass(frozen=True)
class PamSimResult:
    joint: SimResult
    single_user: SimResult
    mismatches: int
    oracle: float

    def to_json(self) -> dict:
        return {"joint": self.joint.to_json(), "single_user": self.single_user.to_json(),
                "paired_mismatches": self.mismatches, "oracle": self.oracle}


def simulate_pam_mac(t: PamTriplet, noise_std: float, cfg: SimConfig) -> PamSimResult:
    """Users send c1 + c2, the receiver rounds to the sum PAM and splits the
    label back into (i1, i2).  The paired single-user receiver decodes the
    same received value by exhaustive nearest-point search over the l0-PAM."""
    if not noise_std > 0:
        raise MacexpError("noise_std must be positive")
    c1, c2, _ = t.integer_codebooks()
    half = (t.l0 - 1) // 2
    ej = es = mism = 0
    for size, rng in cfg.blocks():
        i1 = rng.integers(0, t.n1, size)
        i2 = rng.integers(0, t.l1, size)
        z = noise_std * box_muller(rng, size)
        point = c1[i1] + c2[i2]
        y = point * t.step + z
        a = pam_quantize(y, t)
        j1, j2 = np.divmod(a + half, t.l1)
        wrong_joint = (j1 != i1) | (j2 != i2)
        wrong_su = _nearest_pam_point(y, t) != point
        ej += np.count_nonzero(wrong_joint)
        es += np.count_nonzero(wrong_su)
        mism += np.count_nonzero(wrong_joint != wrong_su)
    return PamSimResult(confidence_interval(int(ej), cfg.trials),
                        confidence_interval(int(es), cfg.trials),
                        int(mism), pam_error_oracle(t, noise_std))
