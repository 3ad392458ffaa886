"""Two facilities covering an uncertain density on [0, 4].

Two agents serve a histogram density with bins [0,2] and [2,4] whose
heights are only known to lie in [0, 0.45] (and integrate to 1).  The
worst-case coverage cost is nonsmooth along the configurations where the
agents' midpoint crosses the interior bin edge, which defeats plain
gradient descent; the sampling-based solver walks through the kink to the
center (1, 3) of the square.

Run:  python3 demos/two_agent_coverage.py
"""

import numpy as np

from gradsamp import (
    CoverageProblem,
    GsParams,
    Rng,
    gradient_descent_baseline,
    make_coverage_oracle,
    run,
)


def main():
    prob = CoverageProblem(
        n_agents=2,
        bin_edges=(0.0, 2.0, 4.0),
        theta_lower=(0.0, 0.0),
        theta_upper=(0.45, 0.45),
    )
    oracle = make_coverage_oracle(prob)
    params = GsParams(max_iters=5000, eps_min=1e-3, nu_min=1e-3)

    print("two-agent coverage on [0,4], bin heights in [0,0.45]^2")
    print(f"{'start':>14} | {'sampling final':>16} {'f':>8} | "
          f"{'plain GD final':>16} {'f':>8}")
    gen = np.random.Generator(np.random.Philox(42))
    for _ in range(5):
        x1 = gen.random(2) * [2.0, 2.0] + [0.0, 2.0]
        trace = run(oracle, params, x1, Rng(int(gen.integers(1 << 31))))
        gd = gradient_descent_baseline(oracle, params, x1)
        fx = np.asarray(trace.final_x)
        gx = np.asarray(gd.final_x)
        print(f"({x1[0]:5.2f},{x1[1]:5.2f}) | "
              f"({fx[0]:6.3f},{fx[1]:6.3f}) {trace.final_f:8.4f} | "
              f"({gx[0]:6.3f},{gx[1]:6.3f}) {gd.final_f:8.4f}")

    print("\nthe optimum is (1, 3) with worst-case cost 1.0; plain GD "
          "stalls on the kink,")
    print("while the sampled min-norm direction keeps making progress.")


if __name__ == "__main__":
    main()
