"""Data behind the figures, as tables, plus matplotlib renderings of them.

A table is a list of named columns with one row per sample, a parameter
dict and a dict of marked points.  CSV form::

    # figure: fig1
    # params: {...}
    # markers: {...}
    rate,random_coding,expurgated,best_known
    ...

Numbers carry 12 significant digits in both CSV and JSON, so either form
reads back to the same table.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .channels import AdditiveNoiseChannel, Pmf, binary_example_channel
from .curves import fmt, rounded
from .errors import MacexpError
from .gaussian_exponents import (GaussianMacParams, db_to_linear, distributed_nesting_exponent,
                                 gallager_spherical_ub, gaussian_capacity,
                                 gaussian_critical_rate, gaussian_expurgation_rate,
                                 su_gaussian_best)
from .su_exponents import (best_known_exponent, capacity, critical_rate,
                           expurgation_rate, slepian_wolf_mac_exponent,
                           time_sharing_expurgated_exponent)
from .transform import TransformSpec, virtual_exponent

FIGURES = ("fig1", "fig2", "region", "fig4a", "fig4b", "fig4c", "fig4d")
FIG4_SNRS_DB = {"fig4a": (30.0, 27.0), "fig4b": (50.0, 25.0),
                "fig4c": (6.0, 3.0), "fig4d": (10.0, 1.0)}
DEFAULT_RESOLUTION = {"fig1": 101, "fig2": 21, "region": 101,
                      "fig4a": 101, "fig4b": 101, "fig4c": 101, "fig4d": 101}


def _cell(v):
    return v if isinstance(v, str) else rounded(v)


@dataclass(frozen=True)
class FigureData:
    figure: str
    columns: tuple
    rows: tuple
    params: dict = field(default_factory=dict)
    markers: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        vals = [r[j] for r in self.rows]
        return np.array(vals, dtype=object if isinstance(vals[0], str) else float)

    def to_json(self) -> dict:
        return {"figure": self.figure, "params": self.params,
                "markers": {k: rounded(v) for k, v in self.markers.items()},
                "columns": list(self.columns),
                "rows": [[_cell(v) for v in r] for r in self.rows]}

    @classmethod
    def from_json(cls, doc) -> "FigureData":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["figure"], tuple(doc["columns"]), tuple(tuple(r) for r in doc["rows"]),
                   doc.get("params", {}), doc.get("markers", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# figure: {self.figure}\n")
        buf.write(f"# params: {json.dumps(self.params, sort_keys=True)}\n")
        marks = {k: rounded(v) for k, v in self.markers.items()}
        buf.write(f"# markers: {json.dumps(marks, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FigureData":
        meta, body = {}, []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, val = line[2:].partition(":")
                meta[key.strip()] = val.strip()
            elif line.strip():
                body.append(line)
        reader = csv.reader(body)
        columns = tuple(next(reader))
        rows = []
        for r in reader:
            rows.append(tuple(v if _is_label(v) else float(v) for v in r))
        return cls(meta.get("figure", ""), columns, tuple(rows),
                   json.loads(meta.get("params", "{}")), json.loads(meta.get("markers", "{}")))


def _is_label(v: str) -> bool:
    try:
        float(v)
        return False
    except ValueError:
        return True


def _table(figure, columns, rows, params, markers) -> FigureData:
    rows = tuple(tuple(v if isinstance(v, str) else float(v) for v in r) for r in rows)
    return FigureData(figure, tuple(columns), rows, params,
                      {k: float(v) for k, v in markers.items()})


def _crossing(x, diff):
    """First x where ``diff`` goes from > 0 to <= 0, by linear interpolation."""
    for i in range(1, len(x)):
        if diff[i - 1] > 0 >= diff[i]:
            t = diff[i - 1] / (diff[i - 1] - diff[i])
            return x[i - 1] + t * (x[i] - x[i - 1])
    return None


# --- individual figures --------------------------------------------------------

def fig1_data(resolution: int = 101, delta: float = 0.02) -> FigureData:
    """Random-coding and best known exponents of the BSC(delta) versus rate."""
    ch = AdditiveNoiseChannel(2, Pmf.bernoulli(delta)).to_dmc()
    cap = capacity(ch)[0]
    rates = np.linspace(0.0, cap, resolution)
    rows = []
    for r in rates:
        rep = best_known_exponent(ch, float(r))
        rows.append((r, max(rep.e_r, 0.0), max(rep.e_ex, 0.0), max(rep.e_best, 0.0)))
    markers = {"capacity": cap, "critical_rate": critical_rate(ch),
               "expurgation_rate": expurgation_rate(ch)}
    return _table("fig1", ("rate", "random_coding", "expurgated", "best_known"), rows,
                  {"delta": delta}, markers)


def fig2_row(p: float, q: float = 0.1) -> tuple:
    mac = binary_example_channel(q, p)
    sw = slepian_wolf_mac_exponent(mac, 0.0, 0.0)
    vc = virtual_exponent(mac, TransformSpec.identity(2), 0.0)
    ts = time_sharing_expurgated_exponent(mac, 0.0, 0.0)
    return p, sw, vc, ts


def fig2_data(resolution: int = 21, q: float = 0.1) -> FigureData:
    """Slepian-Wolf and virtual-channel exponents at zero rates versus p."""
    ps = np.linspace(0.0, 1.0, resolution)
    rows = [fig2_row(float(p), q) for p in ps]
    diff = np.array([r[2] - r[1] for r in rows])
    markers = {}
    cross = _crossing(ps, diff)
    if cross is not None:
        # refine the interpolated crossing on its grid bracket
        i = int(np.searchsorted(ps, cross))
        lo, hi = ps[max(i - 1, 0)], ps[min(i, len(ps) - 1)]
        f = lambda p: fig2_row(p, q)[2] - fig2_row(p, q)[1]
        if lo < hi and f(lo) > 0 >= f(hi):
            cross = brentq(f, lo, hi, xtol=1e-8)
        markers["crossover_p"] = cross
    return _table("fig2", ("p", "slepian_wolf", "virtual", "time_sharing"), rows,
                  {"q": q, "r1": 0.0, "r2": 0.0}, markers)


def region_data(resolution: int = 101, a1_db: float = 30.0, a2_db: float = 27.0) -> FigureData:
    """Boundaries in the (R1, R2) plane: capacity region, R_struct, the line
    mu1 = mu2 and the edge of the expurgation region min(mu1, mu2) >= 4."""
    a1, a2 = db_to_linear(a1_db), db_to_linear(a2_db)
    if a1 < a2:
        raise MacexpError("region needs A1 >= A2")
    rows = []
    c1, c2, cs = gaussian_capacity(a1), gaussian_capacity(a2), gaussian_capacity(a1 + a2)
    for r1, r2 in [(0.0, c2), (cs - c2, c2), (c1, cs - c1), (c1, 0.0)]:
        rows.append(("capacity", r1, r2))
    d1, d2 = 0.5 * math.log(a1), 0.5 * math.log(a2)
    for r1, r2 in [(0.0, d2), (d1 - d2, d2), (d1, 0.0)]:
        rows.append(("r_struct", r1, r2))
    split = 0.5 * math.log(a1 / a2)
    for r2 in np.linspace(0.0, d2, resolution):
        rows.append(("mu1_eq_mu2", split, r2))
    e1, e2 = 0.5 * math.log(a1 / 4.0), 0.5 * math.log(a2 / 4.0)
    if e2 > 0 and e1 > 0:
        corner = max(e1 - e2, 0.0)
        for r1, r2 in [(0.0, min(e2, e1)), (corner, min(e2, e1)), (e1, 0.0)]:
            rows.append(("expurgation_edge", r1, r2))
    markers = {"half_log_a1": d1, "half_log_a2": d2, "half_log_a1_over_a2": split}
    return _table("region", ("curve", "r1", "r2"), rows,
                  {"a1_db": a1_db, "a2_db": a2_db}, markers)


def fig4_data(figure: str, resolution: int = 101, a1_db=None, a2_db=None) -> FigureData:
    """Gallager's spherical-shell bound, the distributed-nesting exponent and
    the single-user benchmark versus x = R2 / (log(A2)/2), R1 = log(A1/A2)/2."""
    d1, d2 = FIG4_SNRS_DB.get(figure, (None, None))
    a1_db = d1 if a1_db is None else a1_db
    a2_db = d2 if a2_db is None else a2_db
    if a1_db is None or a2_db is None:
        raise MacexpError(f"unknown figure {figure!r}")
    a1, a2 = db_to_linear(a1_db), db_to_linear(a2_db)
    r1 = 0.5 * math.log(a1 / a2)
    half = 0.5 * math.log(a2)
    if half <= 0:
        raise MacexpError("need A2 > 1 (0 dB) so that R_struct is nonempty")
    rows = []
    for x in np.linspace(0.0, 1.0, resolution):
        r2 = x * half
        ub = gallager_spherical_ub(r1 + r2, a1, a2)[0]
        dn = distributed_nesting_exponent(GaussianMacParams(a1, a2, r1, r2))[0]
        su = su_gaussian_best(r1 + r2, a1 + a2)
        rows.append((x, r2, ub, dn, su))
    xs = np.array([r[0] for r in rows])
    diff = np.array([r[3] - r[2] for r in rows])
    markers = {"r1": r1,
               "x_expurgation_rate": (gaussian_expurgation_rate(a1 + a2) - r1) / half,
               "x_critical_rate": (gaussian_critical_rate(a1 + a2) - r1) / half}
    cross = _crossing(xs, diff)
    if diff[0] > 0 and cross is not None:
        markers["x_dn_above_ub_until"] = cross
    return _table(figure, ("x", "r2", "spherical_ub", "distributed_nesting", "single_user"),
                  rows, {"a1_db": a1_db, "a2_db": a2_db}, markers)


def figure_data(figure: str, resolution=None, **kw) -> FigureData:
    if figure not in FIGURES:
        raise MacexpError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    res = DEFAULT_RESOLUTION[figure] if resolution is None else int(resolution)
    if res < 2:
        raise MacexpError("resolution must be >= 2")
    if figure == "fig1":
        return fig1_data(res, **kw)
    if figure == "fig2":
        return fig2_data(res, **kw)
    if figure == "region":
        return region_data(res, **kw)
    return fig4_data(figure, res, **kw)


# --- rendering -----------------------------------------------------------------

def render(data: FigureData, path) -> None:
    """Draw ``data`` with matplotlib (Agg) and save to ``path``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    m = data.markers
    if data.figure == "fig1":
        r = data.column("rate")
        ax.plot(r, data.column("random_coding"), "--", label="random coding")
        ax.plot(r, data.column("best_known"), "-", label="best known")
        for key, lab in (("expurgation_rate", "$R_{ex}$"), ("critical_rate", "$R_{cr}$")):
            if key in m:
                ax.axvline(m[key], color="0.6", lw=0.8)
                ax.annotate(lab, (m[key], 0), xytext=(3, 3), textcoords="offset points")
        ax.set_xlabel("rate [nats]")
        ax.set_ylabel("exponent")
    elif data.figure == "fig2":
        p = data.column("p")
        ax.plot(p, data.column("slepian_wolf"), "--", label="Slepian-Wolf")
        ax.plot(p, data.column("virtual"), "-", label="virtual channel")
        ax.plot(p, data.column("time_sharing"), ":", label="time sharing (expurgated)")
        if "crossover_p" in m:
            ax.axvline(m["crossover_p"], color="0.6", lw=0.8)
        ax.set_xlabel("p")
        ax.set_ylabel("exponent at zero rates")
    elif data.figure == "region":
        curves = data.column("curve")
        r1, r2 = data.column("r1"), data.column("r2")
        style = {"capacity": ("k-", 2.0), "r_struct": ("k-", 0.8),
                 "mu1_eq_mu2": ("k-.", 0.8), "expurgation_edge": ("k--", 0.8)}
        for name, (fmt_, lw) in style.items():
            sel = curves == name
            if np.any(sel):
                ax.plot(r1[sel], r2[sel], fmt_, lw=lw, label=name.replace("_", " "))
        ax.set_xlabel("$R_1$ [nats]")
        ax.set_ylabel("$R_2$ [nats]")
    else:
        x = data.column("x")
        ax.plot(x, data.column("spherical_ub"), "--", label="spherical shells (upper bound)")
        ax.plot(x, data.column("distributed_nesting"), "-", label="distributed nesting")
        ax.plot(x, data.column("single_user"), "-.", label="single user, $A_1+A_2$")
        for key in ("x_expurgation_rate", "x_critical_rate"):
            if key in m and 0.0 <= m[key] <= 1.0:
                ax.axvline(m[key], color="0.6", lw=0.8)
        top = max(np.max(data.column(c)) for c in ("spherical_ub", "distributed_nesting",
                                                     "single_user"))
        if top > 0:
            ax.set_yscale("log")
            ax.set_ylim(top * 1e-4, top * 2.0)
        ax.set_xlabel("$R_2 / (\\frac{1}{2}\\log A_2)$")
        ax.set_ylabel("exponent [nats]")
    ax.set_title(f"{data.figure} {json.dumps(data.params, sort_keys=True)}", fontsize=8)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120, format="png")
    plt.close(fig)
