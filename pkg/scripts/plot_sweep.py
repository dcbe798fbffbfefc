"""Plot a bounds sweep written by ``eit-disting sweep --study bounds``.

Not part of the package; needs matplotlib.

    eit-disting sweep --radius 0.1 --stop 0.99 --step 0.01 --out r01.csv
    python3 scripts/plot_sweep.py r01.csv bounds.png
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))]
    return {key: [float(r[key]) for r in rows] for key in ("rho", "ratio", "lower", "upper")}


def main(argv):
    *inputs, output = argv
    fig, ax = plt.subplots(figsize=(5, 4))
    for path in inputs:
        data = load(path)
        ax.plot(data["rho"], data["ratio"], label=path)
    ax.plot(data["rho"], data["lower"], "k--", lw=0.8)
    ax.plot(data["rho"], data["upper"], "k--", lw=0.8)
    ax.set_xlabel("rho")
    ax.set_ylabel("concentric / off-centre norm")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(output, dpi=150)


if __name__ == "__main__":
    main(sys.argv[1:])
