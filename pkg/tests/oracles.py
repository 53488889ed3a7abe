"""Slow, independent reference implementations used as test oracles."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar


def brute_force_split_error(sc, noise, tie_rule="lexicographic-min"):
    """Loop over every received vector and every message pair, in exact
    rationals.  Returns (joint, user1, user2)."""
    g, p, n = sc.parent, sc.parent.p, sc.parent.n
    fr = [Fraction(float(x)) for x in noise.probs]
    pairs = list(itertools.product(itertools.product(range(p), repeat=sc.k1),
                                   itertools.product(range(p), repeat=sc.k2)))
    words = []
    for a, b in pairs:
        u = np.array(list(a) + list(b), dtype=np.int64)
        words.append(tuple(int(x) for x in (u @ g.rows) % p))
    tot = [Fraction(0)] * 3
    for y in itertools.product(range(p), repeat=n):
        py = math.prod(fr[v] for v in y)
        if py == 0:
            continue
        lik = [math.prod(fr[(y[i] - w[i]) % p] for i in range(n)) for w in words]
        best = max(lik)
        winners = [i for i, l in enumerate(lik) if l == best]  # in lexicographic pair order
        wrong = [lambda i: any(pairs[i][0]) or any(pairs[i][1]),
                 lambda i: any(pairs[i][0]),
                 lambda i: any(pairs[i][1])]
        for j, bad in enumerate(wrong):
            if tie_rule == "lexicographic-min":
                w = Fraction(int(bad(winners[0])))
            elif tie_rule == "error":
                w = Fraction(int(any(bad(i) for i in winners)))
            else:
                w = Fraction(sum(bad(i) for i in winners), len(winners))
            tot[j] += py * w
    return tuple(float(t) for t in tot)


def brute_force_conditional(code, noise, message, tie_rule):
    """Pr(decision != message | message sent), looping over noise vectors."""
    p, n = code.p, code.n
    fr = [Fraction(float(x)) for x in noise.probs]
    msgs = list(itertools.product(range(p), repeat=code.k))
    words = [tuple(int(x) for x in code.encode(m)) for m in msgs]
    target = msgs.index(tuple(int(x) % p for x in message))
    c = words[target]
    tot = Fraction(0)
    for e in itertools.product(range(p), repeat=n):
        pe = math.prod(fr[v] for v in e)
        if pe == 0:
            continue
        y = [(c[i] + e[i]) % p for i in range(n)]
        lik = [math.prod(fr[(y[i] - w[i]) % p] for i in range(n)) for w in words]
        best = max(lik)
        winners = [i for i, l in enumerate(lik) if l == best]
        if tie_rule == "lexicographic-min":
            w = Fraction(int(winners[0] != target))
        elif tie_rule == "error":
            w = Fraction(int(len(winners) > 1 or winners[0] != target))
        else:
            w = Fraction(sum(i != target for i in winners), len(winners))
        tot += pe * w
    return float(tot)


def e0_direct(w, px, rho):
    """-log sum_y (sum_x P(x) W(y|x)^(1/(1+rho)))^(1+rho), straight from the definition."""
    inner = (px[:, None] * w ** (1.0 / (1.0 + rho))).sum(axis=0)
    return -math.log(float((inner ** (1.0 + rho)).sum()))


def ex_direct(w, px, rho):
    b = np.sqrt(w[:, None, :] * w[None, :, :]).sum(axis=2)
    return -rho * math.log(float((px[:, None] * px[None, :] * b ** (1.0 / rho)).sum()))


def binary_input_grid_exponent(w, rate, kind="rc", grid=2001, rho_max=64.0):
    """max over a fine grid of binary input pmfs of max over rho, rho found by
    bounded scalar search on a concave function."""
    best = 0.0
    for a in np.linspace(0.0, 1.0, grid):
        px = np.array([1.0 - a, a])
        if kind == "rc":
            f = lambda r: -(e0_direct(w, px, r) - r * rate)
            res = minimize_scalar(f, bounds=(0.0, 1.0), method="bounded",
                                  options={"xatol": 1e-10})
            cands = [-res.fun, -f(0.0), -f(1.0)]
        else:
            f = lambda r: -(ex_direct(w, px, r) - r * rate)
            res = minimize_scalar(f, bounds=(1.0, rho_max), method="bounded",
                                  options={"xatol": 1e-10})
            cands = [-res.fun, -f(1.0), -f(rho_max)]
        best = max(best, *cands)
    return best


def blahut_free_capacity_binary_input(w, grid=200001):
    """max over a grid of binary inputs of I(X;Y)."""
    a = np.linspace(0.0, 1.0, grid)[:, None]
    py = (1 - a) * w[0][None, :] + a * w[1][None, :]

    def h(v):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -np.where(v > 0, v * np.log(v), 0.0).sum(axis=1)

    hw = [-(r[r > 0] * np.log(r[r > 0])).sum() for r in w]
    mi = h(py) - ((1 - a[:, 0]) * hw[0] + a[:, 0] * hw[1])
    return float(mi.max())


def slepian_wolf_grid(mac_table, r1, r2, grid=101):
    """max over a grid of binary input pairs of min(E1, E2, E3), rho by
    bounded search; genie outputs are (x_other, y)."""
    t = np.asarray(mac_table)

    def er(w, px, rate):
        f = lambda r: -(e0_direct(w, px, r) - r * rate)
        res = minimize_scalar(f, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
        return max(-res.fun, -f(0.0), -f(1.0), 0.0)

    best = 0.0
    for a in np.linspace(0, 1, grid):
        p1 = np.array([1 - a, a])
        for b in np.linspace(0, 1, grid):
            p2 = np.array([1 - b, b])
            w1 = (t * p2[None, :, None]).reshape(2, -1)
            w2 = (np.transpose(t, (1, 0, 2)) * p1[None, :, None]).reshape(2, -1)
            w3 = t.reshape(4, -1)
            e3 = er(w3, np.outer(p1, p2).ravel(), r1 + r2)
            if e3 <= best:
                continue
            v = min(er(w1, p1, r1), er(w2, p2, r2), e3)
            best = max(best, v)
    return best


def virtual_noise_by_joint(mac_table, spec):
    """Virtual noise law from the full joint law of (V1, V2, U1, U2, Y), all
    uniform except Y; returns (marginal noise, conditional laws [v1, v2, n])."""
    t = np.asarray(mac_table)
    m = spec.m
    cond = np.zeros((m, m, m))
    for v1, v2, u1, u2 in itertools.product(range(m), repeat=4):
        x1 = spec.f1[(v1 + u1) % m]
        x2 = spec.f2[(v2 + u2) % m]
        for y in range(t.shape[2]):
            s_hat = spec.g[y]
            y_virtual = (s_hat - spec.k1 * u1 - spec.k2 * u2) % m
            n = (y_virtual - spec.k1 * v1 - spec.k2 * v2) % m
            cond[v1, v2, n] += t[x1, x2, y] / (m * m)
    return cond.mean(axis=(0, 1)), cond
