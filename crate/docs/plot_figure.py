"""Plot every CSV written by `cqec figure ID --out DIR` on one set of axes.

usage: python plot_figure.py DIR [out.png]
"""
import csv
import pathlib
import sys

import matplotlib.pyplot as plt


def main():
    src = pathlib.Path(sys.argv[1])
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in sorted(src.glob("*.csv")):
        with path.open() as fh:
            rows = list(csv.reader(fh))
        head, data = rows[0], [[float(x) for x in r] for r in rows[1:]]
        t, f = head.index("t"), head.index("fidelity")
        ax.plot([r[t] for r in data], [r[f] for r in data], label=path.stem.split("_", 1)[-1])
    ax.set_xlabel("t (units of the reference rate)")
    ax.set_ylabel("fidelity")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(sys.argv[2] if len(sys.argv) > 2 else src / "figure.png", dpi=150)


if __name__ == "__main__":
    main()
