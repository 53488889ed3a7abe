"""Linear codes over GF(p), the row-block split of a generator matrix into
two per-user sub-codes, and exact ML error probabilities on additive-noise
channels by exhaustive enumeration.

Vectors over Z_p^n are indexed by their base-p value with the first
coordinate most significant, so index order is lexicographic order.

Exact ties.  The likelihood of a noise vector depends only on its type (the
histogram of its symbols).  Type probabilities are compared as exact
rationals built from the float pmf, so ML ties are detected exactly and the
final error probability (a sum over types, carried out in rationals) does
not depend on the order of summation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._modp import is_prime, nullspace, rank
from .channels import Pmf
from .errors import InvalidDims, MacexpError, NonPrimeModulus, TooLarge

MAX_ENUM = 2 ** 22
TIE_RULES = ("lexicographic-min", "error", "fractional")


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    p: int
    rows: np.ndarray

    def __post_init__(self):
        if not is_prime(int(self.p)):
            raise NonPrimeModulus(f"p={self.p} is not prime")
        a = np.array(self.rows, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] > a.shape[1] or a.shape[1] == 0:
            raise InvalidDims(f"need a k x n matrix with k <= n, got shape {a.shape}")
        a = a % self.p
        if rank(a, self.p) != a.shape[0]:
            raise InvalidDims("generator matrix is not full rank")
        a.setflags(write=False)
        object.__setattr__(self, "rows", a)

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @property
    def rate(self) -> float:
        return self.k / self.n * math.log(self.p)

    def encode(self, u) -> np.ndarray:
        return (np.asarray(u, dtype=np.int64) @ self.rows) % self.p

    def codebook(self) -> set:
        return {tuple(int(x) for x in c) for c in self.encode(all_vectors(self.p, self.k))}

    def __eq__(self, other):
        return (isinstance(other, GeneratorMatrix) and self.p == other.p
                and np.array_equal(self.rows, other.rows))

    def __hash__(self):
        return hash((self.p, self.rows.tobytes(), self.rows.shape))

    def to_json(self) -> dict:
        return {"p": int(self.p), "rows": self.rows.tolist()}

    @classmethod
    def from_json(cls, doc) -> "GeneratorMatrix":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["p"], np.array(doc["rows"], dtype=np.int64))


@dataclass(frozen=True)
class SplitCode:
    parent: GeneratorMatrix
    k1: int

    def __post_init__(self):
        if not 0 <= self.k1 <= self.parent.k:
            raise InvalidDims(f"k1={self.k1} outside [0, {self.parent.k}]")

    @property
    def k2(self) -> int:
        return self.parent.k - self.k1

    @property
    def g1(self) -> np.ndarray:
        return self.parent.rows[:self.k1]

    @property
    def g2(self) -> np.ndarray:
        return self.parent.rows[self.k1:]

    @property
    def rates(self) -> tuple[float, float]:
        unit = math.log(self.parent.p) / self.parent.n
        return self.k1 * unit, self.k2 * unit

    def codebooks(self) -> tuple[set, set]:
        p, n = self.parent.p, self.parent.n
        out = []
        for g, k in ((self.g1, self.k1), (self.g2, self.k2)):
            if k == 0:
                out.append({(0,) * n})
            else:
                out.append({tuple(int(x) for x in c) for c in (all_vectors(p, k) @ g) % p})
        return out[0], out[1]


def split(g: GeneratorMatrix, k1: int) -> SplitCode:
    return SplitCode(g, k1)


def all_vectors(p: int, n: int) -> np.ndarray:
    """All of Z_p^n in lexicographic order, shape (p**n, n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(p ** n, dtype=np.int64)
    powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


def random_full_rank_generator(p: int, k: int, n: int, seed: int,
                               return_attempts: bool = False):
    """Uniform k x n matrix over GF(p) conditioned on full rank (rejection)."""
    if not is_prime(p):
        raise NonPrimeModulus(f"p={p} is not prime")
    if not 1 <= k <= n:
        raise InvalidDims(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    attempts = 0
    while True:
        attempts += 1
        a = rng.integers(0, p, size=(k, n))
        if rank(a, p) == k:
            g = GeneratorMatrix(p, a)
            return (g, attempts) if return_attempts else g


def minkowski_sum(c1, c2, p: int) -> set:
    """{a + b mod p : a in c1, b in c2}."""
    a = np.array(sorted(c1), dtype=np.int64)
    b = np.array(sorted(c2), dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise InvalidDims("codebooks must hold vectors of one common length")
    s = (a[:, None, :] + b[None, :, :]) % p
    return {tuple(int(x) for x in v) for v in s.reshape(-1, a.shape[1])}


def codebook_to_text(codebook) -> str:
    return "".join(" ".join(str(x) for x in v) + "\n" for v in sorted(codebook))


# --- exact error probabilities -------------------------------------------------

def _check_rule(rule: str) -> None:
    if rule not in TIE_RULES:
        raise MacexpError(f"tie rule must be one of {TIE_RULES}, got {rule!r}")


def _check_noise(noise: Pmf, p: int) -> None:
    if noise.alphabet_size != p:
        raise InvalidDims(f"noise alphabet {noise.alphabet_size} does not match p={p}")


class _Space:
    """Z_p^n with noise types, exact type ranks and coset labels of a code."""

    def __init__(self, code: GeneratorMatrix, noise: Pmf, limit: int = MAX_ENUM):
        p, n = code.p, code.n
        if p ** n > limit:
            raise TooLarge(f"p^n = {p}^{n} exceeds the enumeration limit {limit}")
        _check_noise(noise, p)
        self.p, self.n, self.k = p, n, code.k
        self.vec = all_vectors(p, n)
        self.powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
        counts = np.stack([(self.vec == a).sum(axis=1) for a in range(p)], axis=1)
        types, self.type_of = np.unique(counts, axis=0, return_inverse=True)
        self.type_of = self.type_of.ravel()
        fr = [Fraction(float(x)) for x in noise.probs]
        self.type_prob = [math.prod(fr[a] ** int(c) for a, c in enumerate(t)) for t in types]
        order = sorted(set(self.type_prob))
        dense = {v: i for i, v in enumerate(order)}
        self.rank = np.array([dense[v] for v in self.type_prob], dtype=np.int64)[self.type_of]
        h = nullspace(code.rows, p)
        if h.shape[0] == 0:
            self.coset = np.zeros(p ** n, dtype=np.int64)
        else:
            syn = (self.vec @ h.T) % p
            self.coset = syn @ (p ** np.arange(h.shape[0] - 1, -1, -1, dtype=np.int64))
        ncos = p ** (n - code.k)
        self.maxrank = np.full(ncos, -1, dtype=np.int64)
        np.maximum.at(self.maxrank, self.coset, self.rank)
        self.in_m = self.rank == self.maxrank[self.coset]
        self.m_size = np.bincount(self.coset, weights=self.in_m, minlength=ncos).astype(np.int64)

    def index_of(self, v: np.ndarray) -> np.ndarray:
        return (v % self.p) @ self.powers

    def maximizers_in(self, rows: np.ndarray) -> np.ndarray:
        """For every y: the number of ML noise maximizers in y + span(rows)."""
        if rows.shape[0] == 0:
            return self.in_m.astype(np.int64)
        h = nullspace(rows, self.p)
        if h.shape[0] == 0:
            lab = np.zeros(self.vec.shape[0], dtype=np.int64)
        else:
            lab = ((self.vec @ h.T) % self.p) @ (self.p ** np.arange(h.shape[0] - 1, -1, -1,
                                                                     dtype=np.int64))
        cnt = np.bincount(lab, weights=self.in_m, minlength=int(lab.max()) + 1)
        return cnt.astype(np.int64)[lab]

    def lexmin_decision(self, rows: np.ndarray) -> np.ndarray:
        """Digits of the lexicographically smallest ML message for every
        received y, where the code is spanned by ``rows`` in message order.

        Digit j is the least d for which some maximizer e lies in
        y - (digits so far) - d g_j + span(g_{j+1}, ...); this walks the
        nested subcodes instead of listing tied candidates.
        """
        k = rows.shape[0]
        cur = np.arange(self.vec.shape[0], dtype=np.int64)
        digits = np.zeros((cur.size, k), dtype=np.int64)
        for j in range(k):
            hits = self.maximizers_in(rows[j + 1:])
            nxt = cur.copy()
            found = np.zeros(cur.size, dtype=bool)
            for d in range(self.p):
                z = self.index_of(self.vec[cur] - d * rows[j])
                ok = ~found & (hits[z] > 0)
                digits[ok, j] = d
                nxt[ok] = z[ok]
                found |= ok
            cur = nxt
        return digits

    def total(self, weights_num: np.ndarray, weights_den: np.ndarray) -> float:
        """sum_y Pr(y) * num(y)/den(y), exactly, rounded once to float."""
        acc = Fraction(0)
        key = self.type_of * (int(weights_den.max()) + 1) + weights_den
        uniq, inv = np.unique(key, return_inverse=True)
        sums = np.bincount(inv.ravel(), weights=weights_num.astype(float), minlength=uniq.size)
        for u, s in zip(uniq, sums):
            t, d = divmod(int(u), int(weights_den.max()) + 1)
            if s:
                acc += Fraction(int(round(s)), d) * self.type_prob[t]
        return float(acc)


def exact_ml_error_probability(code: GeneratorMatrix, noise: Pmf,
                               tie_rule: str = "lexicographic-min",
                               limit: int = MAX_ENUM) -> float:
    """Pr(ML decision != 0) when the all-zero codeword is sent over Y = c + N.

    For a received y the ML candidates are y - e for the most likely noise
    vectors e in the coset y + C.  The zero codeword is among them exactly
    when y itself is one of those maximizers.  Tie rules:

    lexicographic-min  the smallest message wins; message 0 always wins
    error              any tie counts as a decoding error
    fractional         a tie among t candidates is won with probability 1/t
    """
    _check_rule(tie_rule)
    sp = _Space(code, noise, limit)
    size = sp.m_size[sp.coset]
    if tie_rule == "lexicographic-min":
        num, den = (~sp.in_m).astype(np.int64), np.ones_like(size)
    elif tie_rule == "error":
        num, den = (~(sp.in_m & (size == 1))).astype(np.int64), np.ones_like(size)
    else:
        num, den = size - sp.in_m, size
    return sp.total(num, den)


@dataclass(frozen=True)
class SplitErrorReport:
    joint_err: float
    user1_err: float
    user2_err: float

    def __iter__(self):
        return iter((self.joint_err, self.user1_err, self.user2_err))


def exact_split_mac_error_probability(sc: SplitCode, noise: Pmf,
                                      tie_rule: str = "lexicographic-min",
                                      limit: int = MAX_ENUM) -> SplitErrorReport:
    """Exact error probabilities of joint ML decoding of (u1, u2) = (0, 0) sent
    over Y = u1 G1 + u2 G2 + N.  Pairs are ordered by the concatenated message
    for the lexicographic tie rule.  Under the error rule a user errs when any
    ML winner carries a wrong message for that user, so a tie between pairs
    that agree on u1 is not an error for user 1."""
    _check_rule(tie_rule)
    g = sc.parent
    sp = _Space(g, noise, limit)
    size = sp.m_size[sp.coset]
    if tie_rule == "lexicographic-min":
        d = sp.lexmin_decision(g.rows)
        n1 = d[:, :sc.k1].any(axis=1)
        n2 = d[:, sc.k1:].any(axis=1)
        nums, den = (n1 | n2, n1, n2), np.ones_like(size)
    else:
        # winners with u1 = 0 are the maximizers e with y - e in C2, i.e. e in y + C2
        wrong = (size - sp.in_m, size - sp.maximizers_in(sc.g2), size - sp.maximizers_in(sc.g1))
        if tie_rule == "error":
            nums, den = tuple(w > 0 for w in wrong), np.ones_like(size)
        else:
            nums, den = wrong, size
    nj, n1, n2 = (np.asarray(v, dtype=np.int64) for v in nums)
    return SplitErrorReport(sp.total(nj, den), sp.total(n1, den), sp.total(n2, den))


def conditional_error_probability(code: GeneratorMatrix, noise: Pmf, message,
                                  tie_rule: str = "lexicographic-min",
                                  limit: int = MAX_ENUM) -> float:
    """Pr(ML decision != message) when codeword message*G is sent.

    Under the error and fractional rules this equals the all-zero value for
    every message.  Under lexicographic-min it can differ, because the rule
    favours message 0 specifically.
    """
    _check_rule(tie_rule)
    if tie_rule != "lexicographic-min":
        return exact_ml_error_probability(code, noise, tie_rule, limit)
    sp = _Space(code, noise, limit)
    u = np.asarray(message, dtype=np.int64) % code.p
    # received y = c + e; the weight sits on e, the decision on y
    y_of_e = sp.index_of(sp.vec + code.encode(u)[None, :])
    d = sp.lexmin_decision(code.rows)
    num = (d[y_of_e] != u[None, :]).any(axis=1).astype(np.int64)
    return sp.total(num, np.ones_like(num))

