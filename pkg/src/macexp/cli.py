"""Command-line front end.

    python -m macexp su --noise 0.98,0.02 --grid 11
    python -m macexp gaussian --snr 10db --rates 0,0.5,1
    python -m macexp gaussian --a1 30db --a2 27db --r1 0.3 --r2 1.0
    python -m macexp mac --example 0.1,0.3 --r1 0 --r2 0
    python -m macexp transform --example 0.1,0.3
    python -m macexp search --example 0.1,0.3 --m 2
    python -m macexp simulate split --p 2 --n 8 --k 4 --k1 2 --noise 0.9,0.1 --trials 10000 --seed 1
    python -m macexp simulate pam --l0 15 --l1 3 --sigma 0.25 --trials 100000 --seed 1
    python -m macexp figure fig1 --out fig1.csv

Every command prints CSV (default) or JSON, or writes it to --out.  Rates
are in nats.  SNRs are linear unless suffixed with ``db``.  Exit status is 0
on success, 2 on usage errors and 1 when the computation fails.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import figures
from .channels import (AdditiveNoiseChannel, Dmc, Mac2, Pmf, binary_example_channel,
                       channel_from_json, mac_from_additive_noise)
from .errors import MacexpError
from .figures import FigureData
from .gaussian_exponents import (GaussianMacParams, db_to_linear, distributed_nesting_exponent,
                                 gallager_spherical_ub, gaussian_capacity,
                                 gaussian_critical_rate, gaussian_expurgation_rate,
                                 r_struct_contains, su_gaussian_expurgated,
                                 su_gaussian_random_coding)
from .linear_codes import random_full_rank_generator, split
from .sim import PamTriplet, SimConfig, simulate_pam_mac, simulate_split_mac
from .su_exponents import (best_known_exponent, capacity, critical_rate, expurgation_rate,
                           slepian_wolf_components, time_sharing_expurgated_exponent)
from .transform import (TransformSpec, apply_transform, binary_gamma, search_transform,
                        virtual_exponent)


class UsageError(Exception):
    pass


# --- argument types -------------------------------------------------------------

def snr(text: str) -> float:
    t = text.strip().lower()
    try:
        val = db_to_linear(float(t[:-2])) if t.endswith("db") else float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an SNR: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("SNR must be positive")
    return val


def floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 0 or math.isnan(v):
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _in_bits(data: FigureData, scaled: tuple) -> FigureData:
    """Rescale the nats-valued columns and markers to bits."""
    k = 1.0 / math.log(2.0)
    idx = [data.columns.index(c) for c in scaled if c in data.columns]
    rows = [tuple(v * k if j in idx else v for j, v in enumerate(r)) for r in data.rows]
    marks = {m: v * k for m, v in data.markers.items()}
    return figures._table(data.figure, data.columns, rows, {**data.params, "units": "bits"}, marks)


NATS_COLUMNS = ("rate", "random_coding", "expurgated", "best_known")


def _rate_grid(args, top: float) -> list[float]:
    if args.rates is not None:
        return sorted(set(args.rates))
    return list(np.linspace(0.0, top, args.grid))


# --- channel loading --------------------------------------------------------------

def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _single_user_channel(args) -> Dmc:
    if args.channel:
        ch = channel_from_json(_load_json(args.channel))
        if isinstance(ch, AdditiveNoiseChannel):
            return ch.to_dmc()
        if isinstance(ch, Dmc):
            return ch
        raise UsageError("su needs an additive or dmc channel, not a MAC")
    noise = Pmf(args.noise)
    return AdditiveNoiseChannel(noise.alphabet_size, noise).to_dmc()


def _mac(args) -> Mac2:
    if args.channel:
        ch = channel_from_json(_load_json(args.channel))
        if isinstance(ch, AdditiveNoiseChannel):
            return mac_from_additive_noise(ch.noise)
        if isinstance(ch, Mac2):
            return ch
        raise UsageError("this command needs a MAC (kind mac2 or additive)")
    if args.example:
        if len(args.example) != 2:
            raise UsageError("--example takes q,p")
        return binary_example_channel(*args.example)
    if args.noise:
        return mac_from_additive_noise(Pmf(args.noise))
    raise UsageError("give --channel, --example or --noise")


def _add_mac_source(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel", metavar="FILE", help="channel JSON {m, kind, probs}")
    g.add_argument("--example", type=floats, metavar="Q,P",
                   help="binary almost-additive MAC with parameters q and p")
    g.add_argument("--noise", type=floats, metavar="P0,P1,..",
                   help="additive MAC Y = X1 + X2 + N with this noise pmf")


# --- commands -------------------------------------------------------------------

def cmd_su(args) -> FigureData:
    ch = _single_user_channel(args)
    cap = capacity(ch)[0]
    rows = []
    for r in _rate_grid(args, cap):
        rep = best_known_exponent(ch, float(r))
        rows.append((r, max(rep.e_r, 0.0), max(rep.e_ex, 0.0), max(rep.e_best, 0.0),
                     rep.rho, rep.ex_rho))
    markers = {"capacity": cap}
    if cap > 1e-12:
        markers.update(critical_rate=critical_rate(ch), expurgation_rate=expurgation_rate(ch))
    data = figures._table("su", NATS_COLUMNS + ("rho", "ex_rho"), rows, {}, markers)
    return _in_bits(data, NATS_COLUMNS) if args.bits else data


def cmd_gaussian(args) -> FigureData:
    if args.a1 is not None or args.a2 is not None:
        if args.a1 is None or args.a2 is None:
            raise UsageError("MAC mode needs both --a1 and --a2")
        p = GaussianMacParams(args.a1, args.a2, args.r1, args.r2)
        dn, mu1, mu2 = distributed_nesting_exponent(p)
        ub, st = gallager_spherical_ub(p.r1 + p.r2, p.a1, p.a2)
        row = (p.r1, p.r2, dn, mu1, mu2, ub, st.rho, st.theta1, st.theta2,
               "yes" if r_struct_contains(p) else "no")
        return figures._table("gaussian_mac", ("r1", "r2", "distributed_nesting", "mu1", "mu2",
                                               "spherical_ub", "rho", "theta1", "theta2",
                                               "in_r_struct"), [row],
                              {"a1": p.a1, "a2": p.a2}, {})
    if args.snr is None:
        raise UsageError("give --snr (single user) or --a1/--a2 (MAC)")
    a = args.snr
    rows = []
    for r in _rate_grid(args, gaussian_capacity(a)):
        er = su_gaussian_random_coding(r, a)
        ex = su_gaussian_expurgated(r, a)
        rows.append((r, er, ex, max(er, ex)))
    markers = {"capacity": gaussian_capacity(a), "critical_rate": gaussian_critical_rate(a),
               "expurgation_rate": gaussian_expurgation_rate(a)}
    data = figures._table("gaussian", NATS_COLUMNS, rows, {"snr": a}, markers)
    return _in_bits(data, NATS_COLUMNS) if args.bits else data


def cmd_mac(args) -> FigureData:
    mac = _mac(args)
    rep = slepian_wolf_components(mac, args.r1, args.r2)
    ts = time_sharing_expurgated_exponent(mac, args.r1, args.r2)
    row = [args.r1, args.r2, rep.value, rep.e1, rep.e2, rep.e3, ts]
    cols = ["r1", "r2", "slepian_wolf", "e1", "e2", "e3", "time_sharing"]
    if mac.table.shape == (2, 2, 2):
        row.append(virtual_exponent(mac, TransformSpec.identity(2), args.r1 + args.r2))
        cols.append("virtual_identity")
    params = {"input1": rep.input1.probs.tolist(), "input2": rep.input2.probs.tolist()}
    return figures._table("mac", cols, [row], params, {})


def cmd_transform(args) -> FigureData:
    mac = _mac(args)
    spec = TransformSpec.from_json(_load_json(args.spec)) if args.spec else \
        TransformSpec.identity(mac.output_size if args.m is None else args.m)
    vc = apply_transform(mac, spec)
    e = virtual_exponent(mac, spec, args.rate)
    rows = [(n, float(v)) for n, v in enumerate(vc.noise.probs)]
    markers = {"exponent": e, "max_dependence": vc.max_dependence, "rate": args.rate}
    if mac.table.shape == (2, 2, 2):
        markers["gamma"] = binary_gamma(mac)
    return figures._table("transform", ("n", "noise"), rows, {"spec": spec.to_json()}, markers)


def cmd_search(args) -> FigureData:
    mac = _mac(args)
    res = search_transform(mac, args.m, budget=args.budget, seed=args.seed, rate=args.rate)
    rows = [(n, float(v)) for n, v in enumerate(res.channel.noise.probs)]
    params = {"spec": res.spec.to_json(), "exhaustive": res.exhaustive,
              "evaluated": res.evaluated, "budget": args.budget, "seed": args.seed}
    return figures._table("search", ("n", "noise"), rows, params,
                          {"exponent": res.exponent, "rate": args.rate})


def _sim_rows(named):
    rows = []
    for name, r in named:
        rows.append((name, r.estimate, r.halfwidth, r.lo, r.hi, r.errors, r.trials))
    return rows


SIM_COLUMNS = ("quantity", "estimate", "halfwidth", "ci_lo", "ci_hi", "errors", "trials")


def cmd_simulate(args) -> FigureData:
    cfg = SimConfig(args.trials, args.seed)
    if args.kind == "split":
        g = random_full_rank_generator(args.p, args.k, args.n, args.gen_seed)
        sc = split(g, args.k1)
        noise = Pmf(args.noise)
        res = simulate_split_mac(sc, noise, cfg)
        rows = _sim_rows([("joint", res.joint), ("user1", res.user1),
                          ("user2", res.user2), ("parent", res.parent)])
        params = {"generator": g.to_json(), "k1": args.k1, "noise": noise.probs.tolist(),
                  "seed": args.seed, "trials": args.trials}
        markers = {"paired_mismatches": res.mismatches}
        if args.exact:
            from .linear_codes import exact_split_mac_error_probability
            ex = exact_split_mac_error_probability(sc, noise, "fractional")
            markers.update(exact_joint=ex.joint_err, exact_user1=ex.user1_err,
                           exact_user2=ex.user2_err)
        return figures._table("simulate_split", SIM_COLUMNS, rows, params, markers)
    t = PamTriplet(args.l0, args.l1, args.step)
    res = simulate_pam_mac(t, args.sigma, cfg)
    rows = _sim_rows([("joint", res.joint), ("single_user", res.single_user)])
    params = {"l0": t.l0, "l1": t.l1, "step": t.step, "sigma": args.sigma,
              "seed": args.seed, "trials": args.trials}
    return figures._table("simulate_pam", SIM_COLUMNS, rows, params,
                          {"paired_mismatches": res.mismatches, "oracle": res.oracle})


def cmd_figure(args) -> FigureData:
    return figures.figure_data(args.figure_id, args.resolution)


# --- parser ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="macexp", description="Error exponents of discrete and Gaussian MACs.",
                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH", help="write here instead of stdout")

    def grid(p):
        p.add_argument("--bits", action="store_true",
                       help="print rates and exponents in bits (--rates are still nats)")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--rates", type=floats, metavar="R,..", help="explicit rates (nats)")
        g.add_argument("--grid", type=int, default=21,
                       help="number of equally spaced rates from 0 to capacity (default 21)")

    p = sub.add_parser("su", help="single-user exponents of an additive channel or DMC")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--noise", type=floats, metavar="P0,P1,..", help="additive noise pmf")
    g.add_argument("--channel", metavar="FILE", help="channel JSON (kind additive or dmc)")
    grid(p)
    common(p)
    p.set_defaults(func=cmd_su)

    p = sub.add_parser("gaussian", help="Gaussian exponents (single user or two-user MAC)")
    p.add_argument("--snr", type=snr, help="single-user SNR (linear, or e.g. 10db)")
    p.add_argument("--a1", type=snr, help="MAC SNR of user 1 (A1 >= A2)")
    p.add_argument("--a2", type=snr, help="MAC SNR of user 2")
    p.add_argument("--r1", type=nonneg, default=0.0, help="rate of user 1 (nats)")
    p.add_argument("--r2", type=nonneg, default=0.0, help="rate of user 2 (nats)")
    grid(p)
    common(p)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("mac", help="Slepian-Wolf, time-sharing and virtual-channel exponents")
    _add_mac_source(p)
    p.add_argument("--r1", type=nonneg, default=0.0)
    p.add_argument("--r2", type=nonneg, default=0.0)
    common(p)
    p.set_defaults(func=cmd_mac)

    p = sub.add_parser("transform", help="virtual additive channel of a MAC")
    _add_mac_source(p)
    p.add_argument("--spec", metavar="FILE", help="TransformSpec JSON (default: identity)")
    p.add_argument("--m", type=int, help="modulus of the identity spec")
    p.add_argument("--rate", type=nonneg, default=0.0, help="sum rate for the exponent")
    common(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("search", help="search transform parameters")
    _add_mac_source(p)
    p.add_argument("--m", type=int, required=True, help="prime modulus")
    p.add_argument("--budget", type=int, default=100_000, help="max specs to evaluate")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled search")
    p.add_argument("--rate", type=nonneg, default=0.0, help="reference sum rate")
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("simulate", help="Monte Carlo simulation")
    ssub = p.add_subparsers(dest="kind", metavar="KIND", parser_class=_Parser)
    ssub.required = True
    for name, hlp in (("split", "split linear code over an additive MAC"),
                      ("pam", "one-dimensional nested PAM over the Gaussian MAC")):
        q = ssub.add_parser(name, help=hlp)
        q.add_argument("--seed", type=int, required=True, help="root seed (required)")
        q.add_argument("--trials", type=int, default=10_000)
        common(q)
        q.set_defaults(func=cmd_simulate)
        if name == "split":
            q.add_argument("--p", type=int, default=2, help="field size (prime)")
            q.add_argument("--n", type=int, required=True, help="block length")
            q.add_argument("--k", type=int, required=True, help="parent code dimension")
            q.add_argument("--k1", type=int, required=True, help="rows given to user 1")
            q.add_argument("--noise", type=floats, required=True, help="noise pmf over Z_p")
            q.add_argument("--gen-seed", type=int, default=0,
                           help="seed of the random generator matrix")
            q.add_argument("--exact", action="store_true",
                           help="also report exact error probabilities (small codes)")
        else:
            q.add_argument("--l0", type=int, required=True)
            q.add_argument("--l1", type=int, required=True)
            q.add_argument("--step", type=float, default=1.0)
            q.add_argument("--sigma", type=float, required=True, help="noise standard deviation")

    p = sub.add_parser("figure", help="data (and a PNG) for a figure")
    p.add_argument("figure_id", choices=figures.FIGURES)
    p.add_argument("--resolution", type=int, help="number of samples along the sweep")
    p.add_argument("--no-plot", action="store_true",
                   help="with --out, skip the PNG written next to the data file")
    common(p)
    p.set_defaults(func=cmd_figure)
    return ap


# --- output ---------------------------------------------------------------------

def _serialize(data: FigureData, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data.to_json(), sort_keys=True, ensure_ascii=False) + "\n"
    return data.to_csv()


def _atomic_write(path: Path, write) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "resolution", None) is not None and args.resolution < 2:
            raise UsageError("--resolution must be >= 2")
        if getattr(args, "grid", None) is not None and args.grid < 2:
            raise UsageError("--grid must be >= 2")
        if getattr(args, "trials", None) is not None and args.trials < 1:
            raise UsageError("--trials must be >= 1")
        data = args.func(args)
        text = _serialize(data, args.format)
        if args.out:
            out = Path(args.out)

            def write_text(tmp):
                Path(tmp).write_text(text, encoding="utf-8")

            _atomic_write(out, write_text)
            if args.command == "figure" and not args.no_plot:
                _atomic_write(out.with_suffix(".png"),
                              lambda tmp: figures.render(data, tmp))
        else:
            sys.stdout.write(text)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except MacexpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
