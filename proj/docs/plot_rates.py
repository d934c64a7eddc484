#!/usr/bin/env python3
"""Plot rate-vs-distance curves from the sweep CSV.

Usage:
    ./build/tools/cowqkd sweep --L 0,10,...,100 --N 1e9,1e10,1e11 \
        --optimize --out rates.csv
    python3 docs/plot_rates.py rates.csv rates.png
"""

import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    csv_path = sys.argv[1]
    out_path = sys.argv[2] if len(sys.argv) > 2 else "rates.png"

    curves = defaultdict(list)
    with open(csv_path, newline="") as handle:
        for row in csv.DictReader(handle):
            rate = float(row["rate_per_pulse"])
            if rate > 0:
                label = f"N={float(row['N']):.0e}, {row['engine']}"
                curves[label].append((float(row["L_km"]), rate))

    fig, ax = plt.subplots(figsize=(6, 4.2))
    for label in sorted(curves):
        points = sorted(curves[label])
        ax.semilogy([p[0] for p in points], [p[1] for p in points], marker="o",
                    markersize=3, label=label)
    ax.set_xlabel("fiber length L (km)")
    ax.set_ylabel("secret key rate per pulse")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=160)
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
