#!/usr/bin/env python3
"""Render the long-format series emitted by `evsim compare` / `evsim scaling`.

Usage: plot_series.py OUT_DIR [...]
Writes one PNG per series file found, next to the CSV.
"""
import csv
import pathlib
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SERIES = {
    "series_max_queue.csv": "max queue length",
    "series_max_sojourn.csv": "max sojourn",
    "series_utility.csv": "mean utility",
    "series_time_saving.csv": "time saving vs two_stage",
}


def plot_series(path: pathlib.Path, label: str) -> None:
    by_policy = defaultdict(lambda: defaultdict(list))
    with path.open() as handle:
        for row in csv.DictReader(handle):
            by_policy[row["policy"]][int(row["epoch"])].append(
                float(row["value"]))
    fig, ax = plt.subplots(figsize=(7, 4))
    for policy, epochs in sorted(by_policy.items()):
        xs = sorted(epochs)
        ys = [sum(epochs[e]) / len(epochs[e]) for e in xs]
        ax.plot(xs, ys, label=policy)
    ax.set_xlabel("epoch")
    ax.set_ylabel(label)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=120)
    plt.close(fig)


def plot_scaling(path: pathlib.Path) -> None:
    rows = list(csv.DictReader(path.open()))
    fig, ax = plt.subplots(figsize=(7, 4))
    policies = sorted({r["policy"] for r in rows})
    for policy in policies:
        pts = sorted((int(r["stations"]), float(r["mean_utility"]))
                     for r in rows if r["policy"] == policy)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=policy)
    ax.set_xlabel("stations")
    ax.set_ylabel("mean utility per EV")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=120)
    plt.close(fig)


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    for arg in sys.argv[1:]:
        out_dir = pathlib.Path(arg)
        for name, label in SERIES.items():
            path = out_dir / name
            if path.exists():
                plot_series(path, label)
                print(f"wrote {path.with_suffix('.png')}")
        scaling = out_dir / "scaling.csv"
        if scaling.exists():
            plot_scaling(scaling)
            print(f"wrote {scaling.with_suffix('.png')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
