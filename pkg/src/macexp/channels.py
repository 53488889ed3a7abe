"""Finite-alphabet channel models.

Alphabets are always ``{0, ..., m-1}`` and addition is modulo ``m``.  All
objects are immutable after construction (their arrays are marked
read-only).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPmf, MacexpError, NotAdditive

TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_simplex(probs: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(probs)):
        raise InvalidPmf(f"{what}: non-finite entries")
    if np.any(probs < 0):
        raise InvalidPmf(f"{what}: negative entries")
    total = probs.sum(axis=-1)
    if np.any(np.abs(total - 1.0) > TOL):
        raise InvalidPmf(f"{what}: entries sum to {total} (not 1)")


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over Z_m."""

    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size < 2:
            raise InvalidPmf("a Pmf needs a 1-d vector with at least 2 entries")
        _check_simplex(p, "Pmf")
        object.__setattr__(self, "probs", p)

    @property
    def alphabet_size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, m: int) -> "Pmf":
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def bernoulli(cls, p: float) -> "Pmf":
        if not 0.0 <= p <= 1.0:
            raise InvalidPmf(f"Bernoulli parameter {p} outside [0, 1]")
        return cls([1.0 - p, p])

    @classmethod
    def point(cls, m: int, at: int = 0) -> "Pmf":
        p = np.zeros(m)
        p[at] = 1.0
        return cls(p)

    def is_degenerate(self) -> bool:
        return bool(np.max(self.probs) == 1.0)

    def __eq__(self, other):
        return isinstance(other, Pmf) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"Pmf({self.probs.tolist()})"


@dataclass(frozen=True, eq=False)
class Dmc:
    """Discrete memoryless channel; ``rows[x, y] = P(y|x)``."""

    rows: np.ndarray

    def __post_init__(self):
        w = _frozen(self.rows)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise InvalidPmf("Dmc rows must form a 2-d array")
        _check_simplex(w, "Dmc row")
        object.__setattr__(self, "rows", w)

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def bsc(cls, delta: float) -> "Dmc":
        return AdditiveNoiseChannel(2, Pmf.bernoulli(delta)).to_dmc()

    def rows_are_permutations(self) -> bool:
        """True when every row is a permutation of the first one."""
        s = np.sort(self.rows, axis=1)
        return bool(np.all(np.abs(s - s[0]) <= TOL))


@dataclass(frozen=True, eq=False)
class Mac2:
    """Two-user MAC; ``table[x1, x2, y] = P(y|x1, x2)``."""

    table: np.ndarray

    def __post_init__(self):
        t = _frozen(self.table)
        if t.ndim != 3:
            raise InvalidPmf("Mac2 table must be 3-d (x1, x2, y)")
        _check_simplex(t, "Mac2 slice")
        object.__setattr__(self, "table", t)

    @property
    def input1_size(self) -> int:
        return self.table.shape[0]

    @property
    def input2_size(self) -> int:
        return self.table.shape[1]

    @property
    def output_size(self) -> int:
        return self.table.shape[2]

    def product_channel(self) -> Dmc:
        """Single-user channel whose input is the pair (x1, x2), index x1*|X2| + x2."""
        return Dmc(self.table.reshape(-1, self.output_size))

    def genie_channel(self, user: int, other_input: np.ndarray) -> Dmc:
        """Channel X_user -> (Y, X_other) with X_other drawn from ``other_input``.

        Output index is ``x_other * |Y| + y``.
        """
        q = np.asarray(other_input, dtype=float)
        t = self.table if user == 1 else np.transpose(self.table, (1, 0, 2))
        w = t * q[None, :, None]
        return Dmc(w.reshape(t.shape[0], -1))

    def slice_channel(self, user: int, other_symbol: int) -> Dmc:
        """Single-user channel seen by ``user`` when the other input is fixed."""
        if user == 1:
            return Dmc(self.table[:, other_symbol, :])
        return Dmc(self.table[other_symbol, :, :])


@dataclass(frozen=True, eq=False)
class AdditiveNoiseChannel:
    """Y = X + N over Z_m."""

    modulus: int
    noise: Pmf

    def __post_init__(self):
        if self.noise.alphabet_size != self.modulus:
            raise InvalidPmf(
                f"noise alphabet {self.noise.alphabet_size} != modulus {self.modulus}"
            )

    def to_dmc(self) -> Dmc:
        m = self.modulus
        x = np.arange(m)
        return Dmc(self.noise.probs[(x[None, :] - x[:, None]) % m])


def mac_from_additive_noise(noise: Pmf) -> Mac2:
    """Y = X1 + X2 + N (mod m)."""
    m = noise.alphabet_size
    x = np.arange(m)
    shift = (x[None, None, :] - x[:, None, None] - x[None, :, None]) % m
    return Mac2(noise.probs[shift])


def associated_single_user(mac: Mac2) -> AdditiveNoiseChannel:
    """Recover the noise law of an additive MAC.

    Every slice (x1, x2) must be the (0, 0) slice shifted by x1 + x2;
    otherwise ``NotAdditive`` is raised.
    """
    m = mac.output_size
    if mac.input1_size != m or mac.input2_size != m:
        raise NotAdditive("input and output alphabets differ in size")
    noise = mac.table[0, 0]
    expected = mac_from_additive_noise(Pmf(noise)).table
    dev = float(np.max(np.abs(expected - mac.table)))
    if dev > TOL:
        raise NotAdditive(f"slices are not modular shifts (max deviation {dev:.3g})")
    return AdditiveNoiseChannel(m, Pmf(noise))


def binary_example_channel(q: float, p: float) -> Mac2:
    """Binary MAC Y = X1 + X2 + Z with Z = Z1 + 1{X1 != X2} Z2.

    Z1 ~ Bernoulli(q), Z2 ~ Bernoulli(p), independent.
    """
    for name, v in (("q", q), ("p", p)):
        if not 0.0 <= v <= 1.0:
            raise MacexpError(f"{name}={v} outside [0, 1]")
    z_equal = q
    z_differ = q * (1 - p) + p * (1 - q)
    t = np.empty((2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            z1 = z_equal if x1 == x2 else z_differ
            s = x1 ^ x2
            t[x1, x2, s] = 1 - z1
            t[x1, x2, s ^ 1] = z1
    return Mac2(t)


# --- JSON ----------------------------------------------------------------

def channel_to_json(ch) -> dict:
    if isinstance(ch, AdditiveNoiseChannel):
        return {"m": ch.modulus, "kind": "additive", "probs": ch.noise.probs.tolist()}
    if isinstance(ch, Mac2):
        return {"m": ch.output_size, "kind": "mac2", "probs": ch.table.tolist()}
    if isinstance(ch, Dmc):
        return {"m": ch.output_size, "kind": "dmc", "probs": ch.rows.tolist()}
    raise TypeError(f"cannot serialize {type(ch).__name__}")


def channel_from_json(doc) -> AdditiveNoiseChannel | Mac2 | Dmc:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        kind, m, probs = doc["kind"], int(doc["m"]), doc["probs"]
    except (KeyError, TypeError) as exc:
        raise MacexpError(f"malformed channel document: {exc}") from None
    if kind == "additive":
        return AdditiveNoiseChannel(m, Pmf(probs))
    if kind in ("mac2", "dmc"):
        ch = Mac2(probs) if kind == "mac2" else Dmc(probs)
        if ch.output_size != m:
            raise MacexpError(f"'m'={m} does not match output alphabet {ch.output_size}")
        return ch
    raise MacexpError(f"unknown channel kind {kind!r}")
