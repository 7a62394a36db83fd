"""Figure scripts over the CSV outputs of the simulator and ``nsk twave``.

Pure readers: every plotted number comes from a CSV written by the C++ side.

    python -m nsk_korteweg.plots state SNAPSHOT SERIES -o fig.png
    python -m nsk_korteweg.plots overlay NUMERIC EXACT -o fig8.png
    python -m nsk_korteweg.plots bitangent REPORT -o fig7.png [--m M]
    python -m nsk_korteweg.plots lambda DECAY_CSV -o decay.png
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

SNAPSHOT_COLUMNS = ("x", "rho", "rho_x", "u", "u_x")
SERIES_COLUMNS = (
    "t", "mass", "energy", "xbar", "c_interface",
    "flux_mean", "flux_std", "umax", "rhomin", "rhomax",
)
PROFILE_COLUMNS = ("x", "rho", "u")

FIGSIZE = (6.0, 4.0)  # 1200 x 800 at 200 dpi
DPI = 200


class ColumnError(ValueError):
    pass


def read_csv(path, required):
    """Columns of a CSV as float lists; '#' lines are skipped."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows:
        raise ColumnError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    missing = [c for c in required if c not in header]
    if missing:
        raise ColumnError(f"{path}: missing columns {missing}")
    cols = {h: [] for h in header}
    for r in rows[1:]:
        if not r:
            continue
        for h, v in zip(header, r):
            cols[h].append(float(v))
    return cols


def read_snapshot(path):
    return read_csv(path, SNAPSHOT_COLUMNS)


def read_series(path):
    return read_csv(path, SERIES_COLUMNS)


def read_profile(path):
    """Profile CSV of ``nsk twave`` plus its ``# omega=..., lambda=...`` header."""
    meta = {}
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("#"):
        for part in first[1:].split(","):
            key, _, value = part.strip().partition("=")
            if key:
                meta[key] = float(value)
    cols = read_csv(path, PROFILE_COLUMNS)
    cols["meta"] = meta
    return cols


def read_report(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            key, sep, value = line.strip().partition("=")
            if sep:
                out[key] = value
    return out


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt, plt.subplots(figsize=FIGSIZE, dpi=DPI)


def plot_state(snapshot, series, out):
    snap = read_snapshot(snapshot)
    ser = read_series(series)
    c = ser["c_interface"][-1] if ser["c_interface"] else 0.0
    flux = [r * (u - c) for r, u in zip(snap["rho"], snap["u"])]
    plt, (fig, ax) = _figure()
    ax.plot(snap["x"], snap["rho"], label="rho")
    ax.plot(snap["x"], snap["u"], label="u")
    ax.axhline(c, color="k", lw=0.8, ls="--", label="c")
    ax.plot(snap["x"], flux, label="rho (u - c)")
    ax.set_xlabel("x")
    ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def plot_overlay(numeric, exact, out):
    a = read_snapshot(numeric)
    b = read_snapshot(exact)
    plt, (fig, ax) = _figure()
    ax.plot(b["x"], b["rho"], "k-", lw=1.0, label="exact")
    ax.plot(a["x"], a["rho"], "o", ms=2, label="numerical")
    ax.set_xlabel("x")
    ax.set_ylabel("rho")
    ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def plot_bitangent(report, out, m=None, samples=400):
    """Psi^m with the two tangent lines stored in a diagnose/simulate report."""
    rep = read_report(report)
    need = ("rhomin", "rhomax", "bitangency.slope_min", "bitangency.intercept_min",
            "bitangency.slope_max", "bitangency.intercept_max")
    missing = [k for k in need if k not in rep]
    if missing:
        raise ColumnError(f"{report}: missing keys {missing}")
    mom = float(rep.get("bitangency.m_est", 0.0)) if m is None else m
    from . import psi_m

    lo, hi = 0.8, 2.2
    xs = [lo + (hi - lo) * i / (samples - 1) for i in range(samples)]
    plt, (fig, ax) = _figure()
    ax.plot(xs, [psi_m(x, mom) for x in xs], "k-", label="Psi^m")
    for tag in ("min", "max"):
        s = float(rep[f"bitangency.slope_{tag}"])
        c = float(rep[f"bitangency.intercept_{tag}"])
        ax.plot(xs, [s * x + c for x in xs], lw=0.8, label=f"tangent at rho_{tag}")
    ax.set_xlabel("rho")
    ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def plot_lambda(decay_csv, out):
    cols = read_csv(decay_csv, ("omega", "lambda"))
    plt, (fig, ax) = _figure()
    ax.semilogy(cols["omega"], [abs(v) for v in cols["lambda"]], "o-")
    ax.set_xlabel("omega")
    ax.set_ylabel("|lambda|")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def main(argv=None):
    p = argparse.ArgumentParser(prog="nsk_korteweg.plots")
    sub = p.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("state")
    s.add_argument("snapshot")
    s.add_argument("series")
    o = sub.add_parser("overlay")
    o.add_argument("numeric")
    o.add_argument("exact")
    b = sub.add_parser("bitangent")
    b.add_argument("report")
    b.add_argument("--m", type=float, default=None)
    lam = sub.add_parser("lambda")
    lam.add_argument("decay")
    for sp in (s, o, b, lam):
        sp.add_argument("-o", "--output", required=True)
    args = p.parse_args(argv)
    try:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        if args.cmd == "state":
            plot_state(args.snapshot, args.series, args.output)
        elif args.cmd == "overlay":
            plot_overlay(args.numeric, args.exact, args.output)
        elif args.cmd == "bitangent":
            plot_bitangent(args.report, args.output, args.m)
        else:
            plot_lambda(args.decay, args.output)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
