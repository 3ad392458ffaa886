"""Agents starting outside the support get pulled back in.

Five agents cover [0, 6] with six unit bins and non-identical height
bounds.  Two agents start outside the support (at -1 and 7); the hinge
penalty makes the support attractive, so the whole trajectory stays in a
fixed neighbourhood and every agent ends strictly inside [0, 6].

Run:  python3 demos/five_agent_attractivity.py
"""

import numpy as np

from gradsamp import CoverageProblem, GsParams, Rng, make_coverage_oracle, run


def main():
    prob = CoverageProblem(
        n_agents=5,
        bin_edges=(0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0),
        theta_lower=(0.02, 0.05, 0.10, 0.03, 0.08, 0.02),
        theta_upper=(0.30, 0.25, 0.35, 0.20, 0.30, 0.25),
        penalty_enabled=True,
        penalty_weight=1.0,
    )
    oracle = make_coverage_oracle(prob)
    x1 = np.array([-1.0, 1.5, 3.0, 4.5, 7.0])
    params = GsParams(m=7, max_iters=1500, eps_min=1e-3, nu_min=1e-3)

    trace = run(oracle, params, x1, Rng(7))

    print("five agents on [0,6], outermost starting at -1 and 7")
    print(f"start : {np.array2string(x1, precision=2)}")
    for r in trace.records[:: max(1, len(trace.records) // 8)]:
        print(f"k={r.k:4d}  x={np.array2string(r.x, precision=3)}  "
              f"f={r.f_approx:.4f}  eps={r.eps:.4f}")
    final = np.asarray(trace.final_x)
    print(f"final : {np.array2string(final, precision=3)}  "
          f"f={trace.final_f:.4f}  ({trace.termination.value}, "
          f"{len(trace.records)} iterations)")

    inside = np.all(final > 0.0) and np.all(final < 6.0)
    lo = min(float(np.min(r.x)) for r in trace.records)
    hi = max(float(np.max(r.x)) for r in trace.records)
    print(f"\nall agents strictly inside (0,6): {inside}")
    print(f"trajectory envelope: [{lo:.3f}, {hi:.3f}] "
          "(never far outside the support)")


if __name__ == "__main__":
    main()
