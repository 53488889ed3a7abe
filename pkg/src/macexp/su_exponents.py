"""Discrete single-user and Slepian-Wolf MAC error exponents.

Everything is in nats.  Gallager's functions are evaluated together with
their derivatives in rho (used to locate the optimal rho by root finding,
since both objectives are concave in rho) and their gradients in the input
distribution (used by the simplex optimizer).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .channels import AdditiveNoiseChannel, Dmc, Mac2, Pmf, associated_single_user
from .errors import MacexpError, NotAdditive, ZeroCapacity

RHO_MAX = 64.0
N_RANDOM_STARTS = 5
_OPT_SEED = 20110731


def _xlogy_pow(w: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Return (w**s, w**s * log w) with the 0 * log 0 = 0 convention."""
    ws = np.power(w, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        wl = np.where(w > 0, ws * np.log(np.where(w > 0, w, 1.0)), 0.0)
    return ws, wl


# --- Gallager E_0 -------------------------------------------------------

def _e0_full(w: np.ndarray, p: np.ndarray, rho: float):
    """E_0 together with d/drho and the gradient in p."""
    s = 1.0 / (1.0 + rho)
    ws, wl = _xlogy_pow(w, s)
    a = p @ ws
    b = p @ wl
    a_pow = np.power(a, 1.0 + rho)
    f = a_pow.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), 0.0)
        ratio = np.where(a > 0, b / np.where(a > 0, a, 1.0), 0.0)
    df = np.sum(a_pow * (la - ratio / (1.0 + rho)))
    grad = -(1.0 + rho) * (ws @ np.power(a, rho)) / f
    return -math.log(f), -df / f, grad


def gallager_e0(channel: Dmc, input: Pmf, rho: float) -> float:
    """Gallager's E_0(rho, P_X) = -log sum_y (sum_x P(x) W(y|x)^{1/(1+rho)})^{1+rho}."""
    if input.alphabet_size != channel.input_size:
        raise MacexpError("input distribution does not match channel input alphabet")
    if rho < 0:
        raise MacexpError("rho must be >= 0")
    return _e0_full(channel.rows, input.probs, rho)[0]


# --- Gallager E_x -------------------------------------------------------

def bhattacharyya(w: np.ndarray) -> np.ndarray:
    sq = np.sqrt(w)
    return sq @ sq.T


def _ex_full(bhat: np.ndarray, p: np.ndarray, rho: float):
    t = 1.0 / rho
    m, ml = _xlogy_pow(bhat, t)
    h = p @ m @ p
    dh = -(p @ ml @ p) / rho**2
    ex = -rho * math.log(h)
    d_ex = -math.log(h) - rho * dh / h
    grad = -2.0 * rho * (m @ p) / h
    return ex, d_ex, grad


def gallager_ex(channel: Dmc, input: Pmf, rho: float) -> float:
    """Gallager's E_x(rho, P_X) (expurgated-bound exponent function); rho >= 1."""
    if input.alphabet_size != channel.input_size:
        raise MacexpError("input distribution does not match channel input alphabet")
    if rho < 1:
        raise MacexpError("E_x is defined here for rho >= 1")
    return _ex_full(bhattacharyya(channel.rows), input.probs, rho)[0]


# --- rho and input optimisation ----------------------------------------

def _maximize_rho(fd: Callable[[float], tuple], rate: float, lo: float, hi: float):
    """Maximise f(rho) - rho*rate over [lo, hi] for concave f.

    ``fd(rho)`` returns (f, f').  Returns (value, rho, hit_upper_bound).
    """
    d_lo = fd(lo)[1]
    if d_lo <= rate:
        return fd(lo)[0] - lo * rate, lo, False
    d_hi = fd(hi)[1]
    if d_hi >= rate:
        return fd(hi)[0] - hi * rate, hi, True
    rho = brentq(lambda r: fd(r)[1] - rate, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return fd(rho)[0] - rho * rate, rho, False


def _project(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, 0.0, None)
    return z / z.sum()


def _maximize_over_simplices(objectives, sizes, jac=True):
    """Maximise min_i objectives[i](blocks) over a product of simplices.

    With ``jac`` each objective maps a list of pmf arrays to
    (value, [gradient per block]); otherwise to a value and SLSQP falls back
    to finite differences.  Multistart: the uniform point plus
    ``N_RANDOM_STARTS`` Dirichlet draws from a fixed seed.  Returns
    (value, blocks).
    """
    offsets = np.cumsum([0] + list(sizes))
    nvar = int(offsets[-1])
    single = len(objectives) == 1
    extra = 0 if single else 1  # epigraph variable t

    def split(z):
        return [_project(z[offsets[i]:offsets[i + 1]]) for i in range(len(sizes))]

    def value_of(blocks):
        return min(o(blocks)[0] if jac else o(blocks) for o in objectives)

    def eq_jac(i):
        g = np.zeros(nvar + extra)
        g[offsets[i]:offsets[i + 1]] = 1.0
        return lambda z: g

    cons = [{"type": "eq", "fun": (lambda z, i=i: z[offsets[i]:offsets[i + 1]].sum() - 1.0),
             "jac": eq_jac(i)} for i in range(len(sizes))]
    if not single:
        for o in objectives:
            f = (lambda z, o=o: o(split(z[:-1]))[0] - z[-1]) if jac else \
                (lambda z, o=o: o(split(z[:-1])) - z[-1])
            cons.append({"type": "ineq", "fun": f})

    rng = np.random.default_rng(_OPT_SEED)
    starts = [np.concatenate([np.full(k, 1.0 / k) for k in sizes])]
    starts += [np.concatenate([rng.dirichlet(np.ones(k)) for k in sizes])
               for _ in range(N_RANDOM_STARTS)]

    best_val, best_blocks = -np.inf, None
    for z0 in starts:
        v0 = value_of(split(z0))
        if v0 > best_val:
            best_val, best_blocks = v0, split(z0)
        if single:
            obj = objectives[0]
            if jac:
                def neg(z):
                    v, g = obj(split(z))
                    return -v, -np.concatenate(g)
            else:
                def neg(z):
                    return -obj(split(z))
            res = minimize(neg, z0, jac=jac, method="SLSQP", bounds=[(0.0, 1.0)] * nvar,
                           constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
            zf = res.x
        else:
            grad_t = np.append(np.zeros(nvar), -1.0)
            res = minimize(lambda z: -z[-1], np.append(z0, v0), jac=lambda z: grad_t,
                           method="SLSQP", bounds=[(0.0, 1.0)] * nvar + [(None, None)],
                           constraints=cons, options={"ftol": 1e-13, "maxiter": 300})
            zf = res.x[:-1]
        blocks = [_project(b) for b in split(zf)]
        v = value_of(blocks)
        if v > best_val:
            best_val, best_blocks = v, blocks
    return best_val, best_blocks


# --- reports -----------------------------------------------------------

@dataclass(frozen=True)
class SuExponentReport:
    rate: float
    e_r: float
    e_ex: Optional[float]
    e_best: float
    rho: float
    input_pmf: Pmf
    ex_rho: Optional[float] = None
    ex_input_pmf: Optional[Pmf] = None
    ex_truncated: bool = False

    @property
    def optimizer_state(self):
        return self.rho, self.input_pmf


def _is_symmetric(channel: Dmc) -> bool:
    return channel.rows_are_permutations()


def capacity(channel: Dmc, tol: float = 1e-13, max_iter: int = 100000) -> tuple[float, Pmf]:
    """Blahut-Arimoto.  Returns (capacity in nats, capacity-achieving input)."""
    w = channel.rows
    nx = w.shape[0]
    r = np.full(nx, 1.0 / nx)
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), 0.0)
    for _ in range(max_iter):
        q = r @ w
        with np.errstate(divide="ignore", invalid="ignore"):
            logq = np.where(q > 0, np.log(np.where(q > 0, q, 1.0)), 0.0)
        d = np.sum(w * (logw - logq[None, :]), axis=1)  # D(W(.|x) || q)
        lower = float(r @ d)
        upper = float(np.max(d))
        if upper - lower < tol:
            break
        r = r * np.exp(d - d.max())
        r /= r.sum()
    return max(lower, 0.0), Pmf(r)


def _rc_given_input(w, p, rate):
    return _maximize_rho(lambda r: _e0_full(w, p, r)[:2], rate, 0.0, 1.0)


def _ex_given_input(bhat, p, rate, rho_max):
    return _maximize_rho(lambda r: _ex_full(bhat, p, r)[:2], rate, 1.0, rho_max)


def _rc_objective(w, rate):
    def obj(blocks):
        p = blocks[0]
        v, rho, _ = _rc_given_input(w, p, rate)
        return v, [_e0_full(w, p, rho)[2]]
    return obj


def _ex_objective(bhat, rate, rho_max):
    def obj(blocks):
        p = blocks[0]
        v, rho, _ = _ex_given_input(bhat, p, rate, rho_max)
        return v, [_ex_full(bhat, p, rho)[2]]
    return obj


def _rc_search(channel: Dmc, rate: float):
    w = channel.rows
    if _is_symmetric(channel):
        p = np.full(channel.input_size, 1.0 / channel.input_size)
    else:
        _, (p,) = _maximize_over_simplices([_rc_objective(w, rate)], [channel.input_size])
    v, rho, _ = _rc_given_input(w, p, rate)
    return max(v, 0.0), rho, Pmf(p)


def _ex_search(channel: Dmc, rate: float, rho_max: float):
    bhat = bhattacharyya(channel.rows)
    if _is_symmetric(channel):
        p = np.full(channel.input_size, 1.0 / channel.input_size)
    else:
        _, (p,) = _maximize_over_simplices([_ex_objective(bhat, rate, rho_max)],
                                           [channel.input_size])
    v, rho, hit = _ex_given_input(bhat, p, rate, rho_max)
    return max(v, 0.0), rho, Pmf(p), hit


def random_coding_exponent(channel: Dmc, rate: float) -> SuExponentReport:
    """E_r(R) = max over rho in [0,1] and P_X of E_0(rho, P_X) - rho R."""
    if rate < 0:
        raise MacexpError("rate must be >= 0")
    v, rho, p = _rc_search(channel, rate)
    return SuExponentReport(rate, v, None, v, rho, p)


def expurgated_search(channel: Dmc, rate: float, rho_max: float = RHO_MAX):
    """Returns (E_ex, maximizing rho, maximizing input, truncated flag).

    ``truncated`` is set when the optimum sits at ``rho_max``; the value is
    then a lower approximation of the supremum over rho >= 1.
    """
    if rate < 0:
        raise MacexpError("rate must be >= 0")
    return _ex_search(channel, rate, rho_max)


def expurgated_exponent(channel: Dmc, rate: float, rho_max: float = RHO_MAX) -> float:
    return expurgated_search(channel, rate, rho_max)[0]


def best_known_exponent(channel: Dmc, rate: float, rho_max: float = RHO_MAX) -> SuExponentReport:
    """max(E_r, E_ex) with both optimizer states."""
    rc = random_coding_exponent(channel, rate)
    ex, ex_rho, ex_p, hit = expurgated_search(channel, rate, rho_max)
    return SuExponentReport(rate, rc.e_r, ex, max(rc.e_r, ex), rc.rho, rc.input_pmf,
                            ex_rho, ex_p, hit)


# --- additive channels ---------------------------------------------------

def renyi_entropy(p: Pmf, beta: float) -> float:
    """Order-beta Renyi entropy in nats; beta = 1 gives Shannon entropy."""
    if beta <= 0:
        raise MacexpError("Renyi order must be positive")
    q = p.probs[p.probs > 0]
    if beta == 1.0:
        return float(-np.sum(q * np.log(q)))
    return float(math.log(np.sum(q**beta)) / (1.0 - beta))


def additive_random_coding_exponent(ch: AdditiveNoiseChannel, rate: float) -> float:
    """E_r(R) = max_{0<=rho<=1} rho [log m - h_{1/(1+rho)}(N) - R]."""
    if rate < 0:
        raise MacexpError("rate must be >= 0")
    m = ch.modulus
    logm = math.log(m)

    def obj(rho):
        if rho == 0.0:
            return 0.0
        return rho * (logm - renyi_entropy(ch.noise, 1.0 / (1.0 + rho)) - rate)

    grid = np.linspace(0.0, 1.0, 65)
    vals = np.array([obj(r) for r in grid])
    i = int(np.argmax(vals))
    best, best_rho = vals[i], grid[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, 64)]
    if hi > lo:
        res = minimize_scalar(lambda r: -obj(r), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if -res.fun > best:
            best, best_rho = -res.fun, res.x
    return max(float(best), 0.0)


# --- critical and expurgation rates ---------------------------------------

def _rho_one_input(channel: Dmc) -> np.ndarray:
    """Input maximising E_0(1, P) (= E_x(1, P))."""
    if _is_symmetric(channel):
        return np.full(channel.input_size, 1.0 / channel.input_size)
    w = channel.rows

    def obj(blocks):
        v, _, g = _e0_full(w, blocks[0], 1.0)
        return v, [g]

    return _maximize_over_simplices([obj], [channel.input_size])[1][0]


def _require_capacity(channel: Dmc) -> float:
    c, _ = capacity(channel)
    if c < 1e-12:
        raise ZeroCapacity("channel has zero capacity")
    return c


def critical_rate(channel: Dmc) -> float:
    """Rate where the optimal rho of E_r leaves 1: dE_0/drho at rho = 1.

    When E_r is a straight line all the way to capacity (noiseless channels)
    the critical rate is reported as 0.
    """
    c = _require_capacity(channel)
    p = _rho_one_input(channel)
    r = _e0_full(channel.rows, p, 1.0)[1]
    if r >= c - 1e-12:
        return 0.0
    return float(r)


def expurgation_rate(channel: Dmc) -> float:
    """Rate where the optimal rho of E_ex leaves 1: dE_x/drho at rho = 1.

    Below it the expurgated exponent is strictly larger than E_r; at and above
    it (up to the critical rate) both equal E_0(1) - R.
    """
    _require_capacity(channel)
    p = _rho_one_input(channel)
    return float(_ex_full(bhattacharyya(channel.rows), p, 1.0)[1])


# --- MAC ------------------------------------------------------------------

@dataclass(frozen=True)
class SlepianWolfReport:
    value: float
    e1: float
    e2: float
    e3: float
    input1: Pmf
    input2: Pmf
    third_dominates: bool


def _genie_rows(table: np.ndarray, q: np.ndarray) -> np.ndarray:
    # rows x1, outputs (x2, y) weighted by q(x2)
    return (table * q[None, :, None]).reshape(table.shape[0], -1)


def _sw_parts(mac: Mac2, p1, p2, r1, r2):
    t = mac.table
    e1 = _rc_given_input(_genie_rows(t, p2), p1, r1)[0]
    e2 = _rc_given_input(_genie_rows(np.transpose(t, (1, 0, 2)), p1), p2, r2)[0]
    e3 = _rc_given_input(t.reshape(-1, t.shape[2]), np.outer(p1, p2).ravel(), r1 + r2)[0]
    return max(e1, 0.0), max(e2, 0.0), max(e3, 0.0)


def slepian_wolf_components(mac: Mac2, r1: float, r2: float) -> SlepianWolfReport:
    """The three Slepian-Wolf random-coding exponents at a common input pair.

    E1, E2 are genie-aided exponents (the other user's codeword is known at
    the decoder), E3 is the exponent of the pair channel at the sum rate.
    The input pair maximises min(E1, E2, E3); for additive MACs it is uniform.
    """
    if r1 < 0 or r2 < 0:
        raise MacexpError("rates must be >= 0")
    n1, n2 = mac.input1_size, mac.input2_size
    try:
        associated_single_user(mac)
        additive = True
    except NotAdditive:
        additive = False
    if additive:
        p1, p2 = np.full(n1, 1.0 / n1), np.full(n2, 1.0 / n2)
    else:
        cache = {}

        def parts(b):
            key = (b[0].tobytes(), b[1].tobytes())
            if key not in cache:
                cache[key] = _sw_parts(mac, b[0], b[1], r1, r2)
            return cache[key]

        objs = [(lambda b, k=k: parts(b)[k]) for k in range(3)]
        _, (p1, p2) = _maximize_over_simplices(objs, [n1, n2], jac=False)
    e1, e2, e3 = _sw_parts(mac, p1, p2, r1, r2)
    value = min(e1, e2, e3)
    return SlepianWolfReport(value, e1, e2, e3, Pmf(p1), Pmf(p2),
                             third_dominates=e3 <= min(e1, e2) + 1e-12)


def slepian_wolf_mac_exponent(mac: Mac2, r1: float, r2: float) -> float:
    return slepian_wolf_components(mac, r1, r2).value


def _best_single_user_slice(mac: Mac2, user: int, rate: float) -> float:
    n_other = mac.input2_size if user == 1 else mac.input1_size
    best = 0.0
    for a in range(n_other):
        ch = mac.slice_channel(user, a)
        if capacity(ch)[0] < 1e-12:
            continue
        best = max(best, best_known_exponent(ch, rate).e_best)
    return best


def time_sharing_expurgated_exponent(mac: Mac2, r1: float, r2: float, grid: int = 101) -> float:
    """Time sharing where each user alone sends an expurgated single-user code.

    User i transmits during a fraction lambda_i of the block (lambda_1 +
    lambda_2 = 1) while the other input is held at its most favourable
    symbol.  The exponent is max over lambda of
    min(lambda E_1(R_1/lambda), (1-lambda) E_2(R_2/(1-lambda))).
    """
    if r1 == 0 and r2 == 0:
        a = _best_single_user_slice(mac, 1, 0.0)
        b = _best_single_user_slice(mac, 2, 0.0)
        return 0.0 if a + b == 0 else a * b / (a + b)

    def ts(lam):
        if lam <= 0:
            return 0.0 if r1 > 0 else min(np.inf, _best_single_user_slice(mac, 2, r2))
        if lam >= 1:
            return 0.0 if r2 > 0 else _best_single_user_slice(mac, 1, r1)
        return min(lam * _best_single_user_slice(mac, 1, r1 / lam),
                   (1 - lam) * _best_single_user_slice(mac, 2, r2 / (1 - lam)))

    lams = np.linspace(0.0, 1.0, grid)
    return float(max(ts(l) for l in lams))
