"""Sampling-based descent driver for min-max objectives.

Each iteration samples points uniformly from a ball around the iterate,
collects approximate gradients of the inner maximum at those points, takes
the negated minimum-norm element of their convex hull as the search
direction, and applies a limited backtracking line search with a hard
floor on the step size.  A plain gradient-descent baseline with the same
step-size limits is included for comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .core import (
    DescentViolationError,
    GsParams,
    GsState,
    IterationRecord,
    NonsmoothPolicy,
    NonsmoothSampleError,
    ProblemOracle,
    StepKind,
    Termination,
    Trace,
    validate_params,
)
from .minnorm import min_norm_point

_TINY = 1e-300


class Rng:
    """Seedable counter-based random stream with a documented draw order.

    Backed by the Philox bit generator, so identical seeds give identical
    streams across runs and platforms.  Draw-order contract: a ball sample
    consumes dim Gaussians followed by one uniform; a unit direction
    consumes one block of dim Gaussians.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.Philox(self.seed))

    def gaussians(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)

    def uniform(self) -> float:
        return float(self._gen.random())


@dataclass
class LineSearchOutcome:
    t: float
    trials: int
    accepted: bool
    theta_at_x: np.ndarray
    theta_at_trial: np.ndarray


def sample_ball(center: np.ndarray, radius: float, count: int,
                rng: Rng) -> List[np.ndarray]:
    """Uniform samples from the closed Euclidean ball B(center, radius).

    Point i consumes n Gaussian draws followed by one uniform draw, in
    index order.  The radial factor is u**(1/n) for u uniform on [0,1].
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if count < 1:
        raise ValueError("count must be at least 1")
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    out = []
    for _ in range(count):
        z = rng.gaussians(n)
        u = rng.uniform()
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            out.append(center.copy())
            continue
        offset = (radius * u ** (1.0 / n)) * (z / nz)
        d = float(np.linalg.norm(offset))
        if d > radius:
            offset *= radius / d
        out.append(center + offset)
    return out


def random_unit_direction(n: int, rng: Rng) -> np.ndarray:
    """Uniform direction on the unit sphere (normalized Gaussian block)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    while True:
        z = rng.gaussians(n)
        nz = float(np.linalg.norm(z))
        if nz > 0.0:
            return z / nz


def build_bundle(oracle: ProblemOracle, samples: List[np.ndarray],
                 delta_k: float) -> List[np.ndarray]:
    """Approximate gradients of the inner maximum at the sampled points.

    For each sample, the inner maximizer is requested within distance
    delta_k / lip_gradF_theta of the argmax, and the gradient of F is
    evaluated there.  All samples must lie in D (the caller enforces the
    membership check of the sampling step).
    """
    if delta_k <= 0.0:
        raise ValueError("delta_k must be positive")
    grads = []
    for s in samples:
        if not oracle.in_D(s):
            raise ValueError("bundle sample outside the smooth set D")
        tol = delta_k / max(oracle.lip_gradF_theta(s), _TINY)
        theta, _ = oracle.inner_max(s, tol)
        grads.append(np.asarray(oracle.grad_x_F(s, theta), dtype=float))
    return grads


def line_search(oracle: ProblemOracle, x: np.ndarray, d: np.ndarray,
                g_norm: float, eps_k: float, p: GsParams) -> LineSearchOutcome:
    """Limited backtracking search along the unit direction d.

    Starts at t = t_init_factor * eps_k and shrinks by gamma until the
    oracle-tolerant sufficient-decrease test passes; returns t = 0 once the
    next trial would undercut the floor gamma * eps_k / 3.  Both function
    values come from the inner oracle at accuracy c_k / (4 L), where
    c_k = gamma * (1 - alpha) * beta * g_norm * eps_k / 3.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
        raise ValueError("search direction must be a unit vector")
    c_k = p.gamma * (1.0 - p.alpha) * p.beta * g_norm * eps_k / 3.0
    theta_x, _ = oracle.inner_max(x, c_k / (4.0 * max(oracle.lip_F_theta(x), _TINY)))
    f_x = oracle.eval_F(x, theta_x)

    t = p.t_init_factor * eps_k
    t_min = p.gamma * eps_k / 3.0
    trials = 0
    theta_trial = theta_x
    while True:
        trials += 1
        x_trial = x + t * d
        theta_trial, _ = oracle.inner_max(
            x_trial, c_k / (4.0 * max(oracle.lip_F_theta(x_trial), _TINY)))
        if oracle.eval_F(x_trial, theta_trial) <= f_x - p.beta * t * g_norm + c_k / 2.0:
            return LineSearchOutcome(t=t, trials=trials, accepted=True,
                                     theta_at_x=theta_x, theta_at_trial=theta_trial)
        if p.gamma * t < t_min:
            return LineSearchOutcome(t=0.0, trials=trials, accepted=False,
                                     theta_at_x=theta_x, theta_at_trial=theta_trial)
        t *= p.gamma


def _objective(oracle: ProblemOracle, x: np.ndarray, delta_k: float) -> float:
    if oracle.exact_inner:
        return oracle.objective(x, 0.0)
    return oracle.objective(x, delta_k)


def step(oracle: ProblemOracle, state: GsState, p: GsParams,
         rng: Rng) -> Tuple[GsState, IterationRecord]:
    """One full iteration: sample, bundle, min-norm direction, line search.

    Raises NonsmoothSampleError when a sample leaves D under the 'stop'
    policy; under 'resample', only the offending points are redrawn.
    """
    t0 = time.perf_counter_ns()
    x = np.asarray(state.x, dtype=float)
    n = x.shape[0]
    m = p.effective_m(n)
    delta_k = p.delta_k(state.k)
    policy = NonsmoothPolicy(p.on_nonsmooth_sample)

    samples = sample_ball(x, state.eps, m, rng)
    draws = m
    for i in range(m):
        while not oracle.in_D(samples[i]):
            if policy is NonsmoothPolicy.STOP:
                raise NonsmoothSampleError(
                    f"sample left the smooth set D at iteration {state.k}")
            samples[i] = sample_ball(x, state.eps, 1, rng)[0]
            draws += 1

    grads = build_bundle(oracle, samples, delta_k)
    res = min_norm_point(grads)
    g = res.point
    g_norm = float(np.linalg.norm(g))

    # A unit direction is drawn every iteration (used only by the null
    # branch) so the stream position is branch-independent.
    d_rand = random_unit_direction(n, rng)

    f_here = _objective(oracle, x, delta_k)

    if g_norm <= state.nu:
        new_state = GsState(k=state.k + 1, x=x, eps=p.mu * state.eps,
                            nu=p.vartheta * state.nu)
        kind = StepKind.NULL_TOLERANCE
        t = 0.0
    else:
        d = -g / g_norm
        ls = line_search(oracle, x, d, g_norm, state.eps, p)
        t = ls.t
        if t > 0.0:
            kind = StepKind.DESCENT
            new_x = x + t * d
        else:
            kind = StepKind.NULL_LINESEARCH
            new_x = x
        new_state = GsState(k=state.k + 1, x=new_x, eps=state.eps, nu=state.nu)

    rec = IterationRecord(
        k=state.k, x=x, f_approx=f_here, eps=state.eps, nu=state.nu,
        g_norm=g_norm, t=t, step_kind=kind, sample_count=draws,
        wall_time_us=(time.perf_counter_ns() - t0) // 1000)
    return new_state, rec


def _check_descent(p: GsParams, records: List[IterationRecord],
                   final_f: float) -> None:
    fs = [r.f_approx for r in records] + [final_f]
    for i, r in enumerate(records):
        if r.t > 0.0:
            bound = fs[i] - p.alpha * p.beta * r.t * r.g_norm
            if fs[i + 1] > bound + 1e-9 * (1.0 + abs(fs[i])):
                raise DescentViolationError(
                    f"iteration {r.k}: f={fs[i + 1]:.17g} exceeds bound {bound:.17g}")


def run(oracle: ProblemOracle, p: GsParams, x1: np.ndarray, rng: Rng,
        check_descent: bool = True) -> Trace:
    """Iterate ``step`` from x1 until a stopping condition fires.

    Stops at max_iters, or when both tolerances drop to their configured
    floors, or when a sample leaves D under the 'stop' policy.  With exact
    inner oracles the recorded objective decreases by at least
    alpha * beta * t_k * ||g^k|| on every accepted step; this is asserted
    at the end of the run unless ``check_descent`` is disabled.
    """
    x1 = np.asarray(x1, dtype=float)
    if not np.all(np.isfinite(x1)):
        raise ValueError("x1 must be finite")
    validate_params(p, x1.shape[0])

    trace = Trace(params_snapshot=p.snapshot(), seed=rng.seed,
                  f_mode="exact" if oracle.exact_inner else "delta")
    state = GsState(k=1, x=x1, eps=p.eps1, nu=p.nu1)
    termination = Termination.MAX_ITERS
    for _ in range(p.max_iters):
        try:
            state, rec = step(oracle, state, p, rng)
        except NonsmoothSampleError:
            termination = Termination.NONSMOOTH_SAMPLE_STOP
            break
        trace.records.append(rec)
        if state.eps <= p.eps_min and state.nu <= p.nu_min:
            termination = Termination.TOLERANCES_REACHED
            break

    if not trace.records:
        trace.records.append(IterationRecord(
            k=1, x=x1, f_approx=_objective(oracle, x1, p.delta_k(1)),
            eps=p.eps1, nu=p.nu1, g_norm=0.0, t=0.0,
            step_kind=StepKind.NULL_TOLERANCE, sample_count=0, wall_time_us=0))

    trace.termination = termination
    trace.final_x = state.x
    trace.final_eps = state.eps
    trace.final_nu = state.nu
    trace.final_f = _objective(oracle, state.x, p.delta_k(state.k))
    if check_descent:
        _check_descent(p, trace.records, trace.final_f)
    return trace


def gradient_descent_baseline(oracle: ProblemOracle, p: GsParams,
                              x1: np.ndarray, max_stall: int = 25) -> Trace:
    """Plain normalized gradient descent under the same step-size limits.

    The direction is the negated gradient of F at the inner maximizer of
    the current iterate; there is no sampling and no tolerance
    discounting.  The backtracking search uses the same step-size limits
    [gamma * eps1 / 3, t_init_factor * eps1] and the same beta/gamma, but
    no oracle-tolerance slack: the baseline evaluates the objective
    directly, so the plain Armijo test applies.  Stops after ``max_stall``
    consecutive failed line searches, when the iterate leaves D, or at
    max_iters.
    """
    x = np.asarray(x1, dtype=float)
    validate_params(p, x.shape[0])
    if not oracle.in_D(x):
        raise ValueError("x1 must lie in the smooth set D")

    trace = Trace(params_snapshot=p.snapshot(), seed=0,
                  f_mode="exact" if oracle.exact_inner else "delta")
    termination = Termination.MAX_ITERS
    stall = 0
    for k in range(1, p.max_iters + 1):
        t0 = time.perf_counter_ns()
        if not oracle.in_D(x):
            termination = Termination.LEFT_DOMAIN
            break
        delta_k = p.delta_k(k)
        theta, _ = oracle.inner_max(x, delta_k)
        grad = np.asarray(oracle.grad_x_F(x, theta), dtype=float)
        g_norm = float(np.linalg.norm(grad))
        f_here = _objective(oracle, x, delta_k)
        if g_norm == 0.0:
            t = 0.0
        else:
            d = -grad / g_norm
            t = p.t_init_factor * p.eps1
            t_min = p.gamma * p.eps1 / 3.0
            while True:
                if _objective(oracle, x + t * d, delta_k) <= f_here - p.beta * t * g_norm:
                    break
                if p.gamma * t < t_min:
                    t = 0.0
                    break
                t *= p.gamma
        kind = StepKind.DESCENT if t > 0.0 else StepKind.NULL_LINESEARCH
        trace.records.append(IterationRecord(
            k=k, x=x, f_approx=f_here, eps=p.eps1, nu=p.nu1, g_norm=g_norm,
            t=t, step_kind=kind, sample_count=0,
            wall_time_us=(time.perf_counter_ns() - t0) // 1000))
        if t > 0.0:
            x = x + t * (-grad / g_norm)
            stall = 0
        else:
            stall += 1
            if stall >= max_stall:
                termination = Termination.STALLED
                break

    trace.termination = termination
    trace.final_x = x
    trace.final_eps = p.eps1
    trace.final_nu = p.nu1
    trace.final_f = _objective(oracle, x, p.delta_k(max(1, len(trace.records))))
    return trace
