"""Least-norm element of the convex hull of a finite point set.

This is the per-iteration quadratic program of the driver: the sampled
gradient bundle is a small polytope (m is about n + 1) and the search
direction is the negated minimum-norm point of its hull.  Solved with
Wolfe's minimum-norm-point method (major/minor cycles over affine
minimizers); a lattice brute-force oracle is provided for testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

_SV_CUTOFF = 1e-12  # relative singular-value cutoff for affine subproblems


@dataclass
class MinNormResult:
    point: np.ndarray       # least-norm element of the hull
    weights: np.ndarray     # simplex coefficients over the input points
    gap: float              # Wolfe certificate: max_i max(0, -<g, p_i - g>)
    iterations: int
    capped: bool = False    # True when the major-cycle cap was hit


def _affine_minimizer(Q: np.ndarray) -> np.ndarray:
    """Coefficients of the least-norm point of the affine hull of rows of Q.

    Solves the KKT system of min ||a^T Q||^2 s.t. sum(a) = 1 by least
    squares, which tolerates rank-deficient (degenerate) subsets.
    """
    s = Q.shape[0]
    M = Q @ Q.T
    A = np.zeros((s + 1, s + 1))
    A[:s, :s] = M
    A[:s, s] = 1.0
    A[s, :s] = 1.0
    b = np.zeros(s + 1)
    b[s] = 1.0
    sol, *_ = np.linalg.lstsq(A, b, rcond=_SV_CUTOFF)
    return sol[:s]


def min_norm_point(points: Sequence[np.ndarray], tol: float = 1e-12) -> MinNormResult:
    """Minimum-norm point of conv(points) with a simplex-weight certificate.

    The returned point g satisfies the Wolfe criterion
    <g, p_i - g> >= -tol * (1 + ||g||^2) for every input point; ``gap``
    reports the worst violation before clipping at zero.  Deterministic for
    a fixed input order; vertex selection breaks ties at the lowest index.
    """
    if len(points) == 0:
        raise ValueError("empty point set")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    P = np.asarray(points, dtype=float)
    if P.ndim != 2:
        raise ValueError("points must share a common dimension")
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite coordinates in input points")
    m = P.shape[0]

    # Deduplicate bitwise-equal points; weights flow to the first occurrence.
    first_idx: List[int] = []
    seen = {}
    for i in range(m):
        key = P[i].tobytes()
        if key not in seen:
            seen[key] = len(first_idx)
            first_idx.append(i)
    Q = P[first_idx]

    norms_sq = np.einsum("ij,ij->i", Q, Q)
    start = int(np.argmin(norms_sq))
    active = [start]
    lam = np.array([1.0])
    g = Q[start].copy()

    max_iter = 64 * m
    it = 0
    capped = False
    while True:
        it += 1
        if it > max_iter:
            capped = True
            break
        dots = Q @ g
        gsq = float(g @ g)
        j = int(np.argmin(dots))
        if dots[j] >= gsq - tol * (1.0 + gsq):
            break
        if j in active:
            break  # numerically stalled; certificate reported below
        active.append(j)
        lam = np.append(lam, 0.0)
        # Minor cycles: pull lam toward the affine minimizer, dropping
        # vertices whose weight hits zero.
        while True:
            alpha = _affine_minimizer(Q[active])
            if np.all(alpha > 1e-14):
                lam = alpha
                break
            mask = alpha <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = lam[mask] / (lam[mask] - alpha[mask])
            theta = float(np.min(ratios))
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-14
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            active = [a for a, k in zip(active, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            if len(active) == 1:
                break
        g = lam @ Q[active]

    lam = np.clip(lam, 0.0, None)
    lam = lam / lam.sum()
    g = lam @ Q[active]

    weights = np.zeros(m)
    for a, w in zip(active, lam):
        weights[first_idx[a]] = w

    dots = Q @ g
    gsq = float(g @ g)
    gap = float(max(0.0, np.max(gsq - dots)))
    return MinNormResult(point=g, weights=weights, gap=gap, iterations=it,
                         capped=capped)


def _compositions(total: int, parts: int):
    """Yield all nonnegative integer vectors of given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _window_eval(P: np.ndarray, denom: int, centers: np.ndarray,
                 width: int) -> Tuple[np.ndarray, float]:
    """Best lattice point (denominator ``denom``) within an L-inf window of
    ``width`` lattice units around ``centers`` (float simplex weights)."""
    m = P.shape[0]
    c = np.rint(centers * denom).astype(int)
    axes = []
    for i in range(m - 1):
        lo = max(0, c[i] - width)
        hi = min(denom, c[i] + width)
        axes.append(np.arange(lo, hi + 1))
    if m == 1:
        lam = np.array([1.0])
        return lam, float(np.linalg.norm(lam @ P))
    grids = np.meshgrid(*axes, indexing="ij")
    head = np.stack([gg.ravel() for gg in grids], axis=1)
    last = denom - head.sum(axis=1)
    ok = (last >= max(0, c[m - 1] - width)) & (last <= min(denom, c[m - 1] + width))
    head = head[ok]
    last = last[ok]
    if head.shape[0] == 0:
        return centers, float(np.linalg.norm(centers @ P))
    lam = np.column_stack([head, last]).astype(float) / denom
    vals = np.linalg.norm(lam @ P, axis=1)
    b = int(np.argmin(vals))
    return lam[b], float(vals[b])


def min_norm_bruteforce(points: Sequence[np.ndarray],
                        grid_resolution: float) -> np.ndarray:
    """Derivative-free lattice search for the hull's minimum-norm point.

    Minimizes ||sum_i lam_i p_i|| over simplex weights on a lattice of
    spacing ``grid_resolution``.  Small lattices are enumerated
    exhaustively; larger ones (the node count grows combinatorially in the
    point count) are searched by exhaustive coarse enumeration followed by
    windowed refinement down to the requested spacing, which the convexity
    of the objective makes reliable in practice.  Intended as an
    independent test oracle, never called by the solver.
    """
    m = len(points)
    if m == 0:
        raise ValueError("empty point set")
    if m > 6:
        raise ValueError("brute force supports at most 6 points")
    if not (0.0 < grid_resolution <= 0.1):
        raise ValueError("grid_resolution must lie in (0, 0.1]")
    P = np.asarray(points, dtype=float)
    denom = max(1, int(round(1.0 / grid_resolution)))

    n_nodes = math.comb(denom + m - 1, m - 1)
    if n_nodes <= 60_000:
        lam = np.array(list(_compositions(denom, m)), dtype=float) / denom
        vals = np.linalg.norm(lam @ P, axis=1)
        best = lam[int(np.argmin(vals))]
        return best @ P

    # Coarse exhaustive pass, then refine around the incumbent.
    coarse = 8
    lam = np.array(list(_compositions(coarse, m)), dtype=float) / coarse
    vals = np.linalg.norm(lam @ P, axis=1)
    best = lam[int(np.argmin(vals))]
    d = coarse
    while d < denom:
        d = min(denom, d * 4)
        best, _ = _window_eval(P, d, best, width=12)
    return best @ P
