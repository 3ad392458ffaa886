"""Stress objective with nondifferentiable points dense in a fat set.

A recursive Cantor-style removal leaves a positive-measure set; on each
removed interval rides a tiny smooth bump, and the objective is the
pointwise maximum of the scaled bump families.  One-sided slopes disagree
at every retained midpoint, so kinks are everywhere at every scale — a
worst case for methods that assume isolated nonsmoothness.  The solver
still runs stably and drives its tolerances down.

Run:  python3 demos/stress_function.py
"""

import numpy as np

from gradsamp import CantorStressProblem, GsParams, Rng, cantor_stress_oracle, run


def main():
    oracle = cantor_stress_oracle(CantorStressProblem(depth=6))

    print("construction (depth 6):")
    for k in range(1, 7):
        mids, delta, eps_k, _ = oracle.level(k)
        print(f"  level {k}: {len(mids):2d} bumps, half-width {delta:.2e}, "
              f"amplitude scale {eps_k:.2e}")

    x0 = oracle.level(3)[0][0]  # a retained level-3 midpoint
    h = 1e-9
    f = lambda x: oracle.objective(np.array([x]))
    right = (f(x0 + h) - f(x0)) / h
    left = (f(x0) - f(x0 - h)) / h
    print(f"\none-sided slopes at a level-3 midpoint x = {x0:.6f}:")
    print(f"  left {left:.3e}  right {right:.3e}  (kink: slopes disagree)")

    params = GsParams(max_iters=300)
    trace = run(oracle, params, np.array([0.41]), Rng(11))
    print(f"\nsolver from x = 0.41: {len(trace.records)} iterations, "
          f"f {trace.records[0].f_approx:.3e} -> {trace.final_f:.3e}, "
          f"nu {params.nu1:.2f} -> {trace.final_nu:.2e}")


if __name__ == "__main__":
    main()
