#!/usr/bin/env python3
"""Plot template for pput CSV exports.

Usage:
  python3 tools/plot.py surfaces <out_dir>   # value surfaces at t=0 per level
  python3 tools/plot.py boundary <out_dir>   # exercise boundaries per level
  python3 tools/plot.py sweep <out_dir>      # top-level values/boundaries across lambda
  python3 tools/plot.py ensemble <out_dir>   # stopping-time histogram

Figures are written next to the CSVs as PNG files.
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return rows


def plot_surfaces(out):
    rows = read_csv(out / "surfaces.csv")
    by_level = defaultdict(list)
    for r in rows:
        if float(r["t"]) == 0.0:
            by_level[int(r["level"])].append((float(r["s"]), float(r["value"])))
    fig, ax = plt.subplots()
    for level in sorted(by_level):
        pts = sorted(by_level[level])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"level {level}")
    ax.set_xlabel("s")
    ax.set_ylabel("value at t=0")
    ax.legend()
    fig.savefig(out / "surfaces_t0.png", dpi=150)


def plot_boundary(out):
    rows = read_csv(out / "boundary.csv")
    by_level = defaultdict(list)
    for r in rows:
        if r["defined_flag"] == "1":
            by_level[int(r["level"])].append((float(r["t"]), float(r["boundary_s"])))
    fig, ax = plt.subplots()
    for level in sorted(by_level):
        pts = sorted(by_level[level])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"level {level}")
    ax.set_xlabel("t")
    ax.set_ylabel("boundary")
    ax.legend()
    fig.savefig(out / "boundary.png", dpi=150)


def plot_sweep(out):
    rows = read_csv(out / "sweep_values.csv")
    top = max(int(r["level"]) for r in rows)
    by_lam = defaultdict(list)
    for r in rows:
        if int(r["level"]) == top:
            by_lam[float(r["lambda"])].append((float(r["s"]), float(r["value_t0"])))
    fig, ax = plt.subplots(1, 2, figsize=(11, 4))
    for lam in sorted(by_lam):
        pts = sorted(by_lam[lam])
        ax[0].plot([p[0] for p in pts], [p[1] for p in pts], label=f"lambda={lam}")
    ax[0].set_xlabel("s")
    ax[0].set_ylabel(f"level-{top} value at t=0")
    ax[0].legend()
    brows = read_csv(out / "sweep_boundary.csv")
    by_lam_b = defaultdict(list)
    for r in brows:
        if r["defined_flag"] == "1":
            by_lam_b[float(r["lambda"])].append((float(r["t"]), float(r["boundary_s"])))
    for lam in sorted(by_lam_b):
        pts = sorted(by_lam_b[lam])
        ax[1].plot([p[0] for p in pts], [p[1] for p in pts], label=f"lambda={lam}")
    ax[1].set_xlabel("t")
    ax[1].set_ylabel("boundary")
    ax[1].legend()
    fig.savefig(out / "sweep.png", dpi=150)


def plot_ensemble(out):
    rows = read_csv(out / "ensemble.csv")
    taus = [float(r["tau"]) for r in rows]
    fig, ax = plt.subplots()
    ax.hist(taus, bins=40)
    ax.set_xlabel("stopping time")
    ax.set_ylabel("paths")
    fig.savefig(out / "ensemble_tau.png", dpi=150)


def main():
    if len(sys.argv) != 3:
        print(__doc__)
        return 1
    kind, out = sys.argv[1], Path(sys.argv[2])
    {"surfaces": plot_surfaces, "boundary": plot_boundary,
     "sweep": plot_sweep, "ensemble": plot_ensemble}[kind](out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
