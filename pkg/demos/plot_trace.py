"""Plot a run's trajectory and diagnostics from an emitted trace.

The library itself never imports a plotting package; runs emit plain CSV
(and `gradsamp plot-data` converts it to whitespace columns for gnuplot
and friends).  This script shows the matplotlib route:

    gradsamp run configs/two_agent.json --out out/two_agent
    python3 demos/plot_trace.py out/two_agent/trace.csv trace.png
"""

import csv
import sys


def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    cols = {key: [float(r[key]) for r in rows]
            for key in rows[0] if key != "step_kind"}
    cols["step_kind"] = [r["step_kind"] for r in rows]
    return cols


def main():
    if len(sys.argv) != 3:
        print(__doc__)
        return 2
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is not installed; install it to render plots")
        return 1

    cols = load(sys.argv[1])
    ks = cols["k"]
    fig, (ax_f, ax_tol) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax_f.plot(ks, cols["f"], lw=1.2)
    ax_f.set_ylabel("objective")
    ax_tol.semilogy(ks, cols["eps"], label="sampling radius")
    ax_tol.semilogy(ks, cols["nu"], label="norm tolerance")
    ax_tol.semilogy(ks, [max(g, 1e-16) for g in cols["g_norm"]],
                    label="|min-norm g|", alpha=0.6)
    ax_tol.set_xlabel("iteration")
    ax_tol.legend()
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=150)
    print(f"wrote {sys.argv[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
