"""Graph matching: linear assignment core, Frank-Wolfe relaxation, and
seeded matching.

The matcher maximizes trace(A P B P^T) over permutation matrices by
Frank-Wolfe ascent on the Birkhoff polytope: at each step the gradient
is 2*A*D*B (symmetric adjacencies), the ascent direction is the
permutation maximizing the linearized objective (a linear assignment
problem), and the step size solves the 1-d quadratic exactly. The final
doubly stochastic iterate is projected to the nearest permutation with
one more assignment solve.

Seeded matching reorders both graphs so the seed pairs occupy a leading
aligned block and optimizes only over the non-seed block; the seed
blocks contribute the linear gradient term 2*A21*B21^T.

Returned permutations use the relabeling convention of
``graphs.apply_permutation``: the result phi minimizes
``gm_objective(a, b, phi)``, and ``apply_permutation(b, phi)`` is b
aligned to a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graphs import (
    BlockPartition,
    apply_permutation,
    gm_objective,
    invert_permutation,
    trace_objective,
)


def _lap_value(cost: np.ndarray) -> float:
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def solve_lap(cost, lexicographic: bool = True) -> tuple[np.ndarray, float]:
    """Exact linear assignment: permutation minimizing sum_i cost[i, phi(i)].

    With ``lexicographic=True`` ties between optimal assignments are
    broken toward the lexicographically smallest assignment vector
    (row-major scan); this costs extra assignment solves and matters
    only for inputs with exact ties. ``lexicographic=False`` keeps the
    backend's deterministic (but unspecified) tie-break.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost must be square, got shape {c.shape}")
    if not np.isfinite(c).all():
        raise ValueError("cost entries must be finite")
    n = c.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0.0
    rows, cols = linear_sum_assignment(c)
    perm = np.asarray(cols, dtype=np.int64)
    if not lexicographic or n == 1:
        return perm, float(c[np.arange(n), perm].sum())

    cols_left = np.ones(n, dtype=bool)
    perm = np.empty(n, dtype=np.int64)
    for i in range(n):
        avail = np.flatnonzero(cols_left)
        sub = c[np.ix_(np.arange(i, n), avail)]
        rem_opt = _lap_value(sub)
        tol = 1e-9 * (1.0 + abs(rem_opt))
        if i == n - 1:
            perm[i] = avail[int(np.argmin(sub[0]))]
            cols_left[perm[i]] = False
            continue
        best_col, best_forced = avail[0], np.inf
        for pos, col in enumerate(avail):
            keep = np.delete(avail, pos)
            forced = c[i, col] + _lap_value(c[np.ix_(np.arange(i + 1, n), keep)])
            if forced <= rem_opt + tol:
                best_col = col
                break
            if forced < best_forced:
                best_col, best_forced = col, forced
        perm[i] = best_col
        cols_left[best_col] = False
    return perm, float(c[np.arange(n), perm].sum())


@dataclass(frozen=True)
class MatchResult:
    """Matcher output: permutation (apply_permutation convention),
    exact objective values, and the relaxed objective trace."""

    permutation: np.ndarray
    objective: int
    trace_value: int
    iterations: int
    converged: bool
    objective_trace: tuple[float, ...]


def _validate_seeds(seeds, n: int) -> np.ndarray:
    if seeds is None:
        return np.zeros((0, 2), dtype=np.int64)
    arr = np.asarray(seeds, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("seeds must be an array of (u, v) pairs")
    if arr.min() < 0 or arr.max() >= n:
        raise ValueError("seed vertex out of range")
    if len(set(arr[:, 0].tolist())) != arr.shape[0] or len(set(arr[:, 1].tolist())) != arr.shape[0]:
        raise ValueError("conflicting seeds: correspondence must be injective on both sides")
    return arr


def _quadratic_step(c2: float, c1: float) -> float:
    """Maximizer of c2*t^2 + c1*t on [0, 1]; ties prefer t = 1."""
    if c2 < 0.0:
        t_star = -c1 / (2.0 * c2)
        if 0.0 < t_star < 1.0:
            return t_star
    g1 = c2 + c1
    return 1.0 if g1 >= 0.0 else 0.0


def sgm_match(a: np.ndarray, b: np.ndarray, seeds=None, init="barycenter",
              max_iters: int = 100, tol: float = 1e-6) -> MatchResult:
    """Seeded Frank-Wolfe graph matching.

    ``seeds`` is an iterable of (u, v) pairs asserting that vertex u of
    a corresponds to vertex v of b; seed pairs are fixed in the output.
    ``init`` is one of "barycenter", "identity", a full-length
    permutation (apply_permutation convention, mapping non-seeds to
    non-seeds), or an explicit doubly stochastic matrix over the
    non-seed block.
    """
    if a.shape != b.shape:
        raise ValueError(f"graph size mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    seed_arr = _validate_seeds(seeds, n)
    s = seed_arr.shape[0]
    m = n - s

    free_a = np.setdiff1d(np.arange(n, dtype=np.int64), seed_arr[:, 0], assume_unique=False)
    free_b = np.setdiff1d(np.arange(n, dtype=np.int64), seed_arr[:, 1], assume_unique=False)
    ra = np.concatenate([seed_arr[:, 0], free_a])
    rb = np.concatenate([seed_arr[:, 1], free_b])

    af = a[np.ix_(ra, ra)].astype(np.float64)
    bf = b[np.ix_(rb, rb)].astype(np.float64)
    a21 = af[s:, :s]
    b21 = bf[s:, :s]
    a22 = af[s:, s:]
    b22 = bf[s:, s:]
    lin = a21 @ b21.T  # gradient contribution of the seed blocks
    const = float((af[:s, :s] * bf[:s, :s]).sum())

    d = _initial_iterate(init, m, n, ra, rb, s)

    def relaxed_obj(mat: np.ndarray) -> float:
        return const + 2.0 * float((lin * mat).sum()) + float((a22 @ mat @ b22 * mat).sum())

    trace_vals = [relaxed_obj(d)] if m > 0 else [const]
    iterations = 0
    converged = m == 0
    for _ in range(max_iters if m > 0 else 0):
        iterations += 1
        grad = 2.0 * (a22 @ d @ b22) + 2.0 * lin
        q, _ = solve_lap(-grad, lexicographic=False)
        qmat = np.zeros((m, m))
        qmat[np.arange(m), q] = 1.0
        r = qmat - d
        c2 = float((a22 @ r @ b22 * r).sum())
        c1 = 2.0 * float((a22 @ r @ b22 * d).sum()) + 2.0 * float((lin * r).sum())
        t = _quadratic_step(c2, c1)
        if t > 0.0:
            d = d + t * r
        new_obj = relaxed_obj(d)
        prev_obj = trace_vals[-1]
        trace_vals.append(new_obj)
        if abs(new_obj - prev_obj) <= tol * max(1.0, abs(prev_obj)):
            converged = True
            break

    if m > 0:
        proj, _ = solve_lap(-d, lexicographic=False)
    else:
        proj = np.zeros(0, dtype=np.int64)

    # canonical full assignment: seeds identity, then projected block
    match = np.empty(n, dtype=np.int64)  # a-vertex -> b-vertex
    match[ra[:s]] = rb[:s]
    match[free_a] = rb[s + proj]
    phi = invert_permutation(match)
    return MatchResult(
        permutation=phi,
        objective=gm_objective(a, b, phi),
        trace_value=trace_objective(a, b, phi),
        iterations=iterations,
        converged=converged,
        objective_trace=tuple(trace_vals),
    )


def _initial_iterate(init, m: int, n: int, ra: np.ndarray, rb: np.ndarray, s: int) -> np.ndarray:
    if m == 0:
        return np.zeros((0, 0))
    if isinstance(init, str):
        if init == "barycenter":
            return np.full((m, m), 1.0 / m)
        if init == "identity":
            return np.eye(m)
        raise ValueError(f"unknown init {init!r}")
    arr = np.asarray(init, dtype=np.float64)
    if arr.ndim == 1:
        phi0 = np.asarray(init, dtype=np.int64)
        if phi0.shape[0] != n or not np.array_equal(np.sort(phi0), np.arange(n)):
            raise ValueError("init permutation must be a bijection of [n]")
        match0 = invert_permutation(phi0)
        pos_b = np.full(n, -1, dtype=np.int64)
        pos_b[rb[s:]] = np.arange(m)
        d = np.zeros((m, m))
        for idx, u in enumerate(ra[s:]):
            j = pos_b[match0[u]]
            if j < 0:
                raise ValueError("init permutation must map non-seeds to non-seed targets")
            d[idx, j] = 1.0
        return d
    if arr.shape != (m, m):
        raise ValueError(f"init matrix must be {m}x{m}, got {arr.shape}")
    if arr.min() < -1e-12:
        raise ValueError("init matrix must be (near) nonnegative")
    if not (np.allclose(arr.sum(axis=0), 1.0, atol=1e-9) and np.allclose(arr.sum(axis=1), 1.0, atol=1e-9)):
        raise ValueError("init matrix must be doubly stochastic")
    return arr


def faq_match(a: np.ndarray, b: np.ndarray, init="barycenter",
              max_iters: int = 100, tol: float = 1e-6) -> MatchResult:
    """Unseeded Frank-Wolfe graph matching (seed set empty)."""
    return sgm_match(a, b, seeds=None, init=init, max_iters=max_iters, tol=tol)


def match_and_align(a: np.ndarray, b: np.ndarray, seeds=None, init="barycenter",
                    max_iters: int = 100, tol: float = 1e-6) -> np.ndarray:
    """Match b to a and return b relabeled by the found permutation.

    The returned graph is the single-solution surrogate of "b matched
    to a": apply_permutation(b, phi) for the matcher's phi, which is one
    element of the (possibly non-unique) argmin set.
    """
    res = sgm_match(a, b, seeds=seeds, init=init, max_iters=max_iters, tol=tol)
    return apply_permutation(b, res.permutation)


def transposition_sweep(a: np.ndarray, b: np.ndarray, partition: BlockPartition):
    """Scan all within-block transpositions for an objective improvement.

    Returns (found, best_pair, best_delta) where found says whether any
    within-block transposition strictly decreases ||A - P B P^T||_F^2,
    best_pair is the (i, j) minimizing the delta (ties broken by block
    then row-major order), and best_delta its value. best_pair is None
    when no block has two vertices.
    """
    if a.shape != b.shape:
        raise ValueError("graph size mismatch")
    ab = a.astype(np.int64) @ b.astype(np.int64)
    diag = np.diag(ab)
    full = diag[:, None] + diag[None, :] - ab - ab.T
    delta = 4 * (full - 2 * (a.astype(np.int64) * b.astype(np.int64)))

    best_delta = None
    best_pair = None
    for blk in range(partition.num_blocks):
        verts = partition.block_vertices(blk)
        if verts.shape[0] < 2:
            continue
        sub = delta[np.ix_(verts, verts)]
        iu, ju = np.triu_indices(verts.shape[0], k=1)
        vals = sub[iu, ju]
        pos = int(np.argmin(vals))
        if best_delta is None or vals[pos] < best_delta:
            best_delta = int(vals[pos])
            best_pair = (int(verts[iu[pos]]), int(verts[ju[pos]]))
    if best_delta is None:
        return False, None, 0
    return best_delta < 0, best_pair, best_delta


# -- file formats -----------------------------------------------------------

def write_permutation(path, phi: np.ndarray) -> None:
    """Write a permutation file: line i holds phi(i), 0-based."""
    with open(path, "w") as fh:
        for v in np.asarray(phi, dtype=np.int64).tolist():
            fh.write(f"{v}\n")


def read_permutation(path) -> np.ndarray:
    with open(path) as fh:
        vals = [int(line.strip()) for line in fh if line.strip()]
    phi = np.asarray(vals, dtype=np.int64)
    if not np.array_equal(np.sort(phi), np.arange(phi.shape[0])):
        raise ValueError(f"{path} does not contain a permutation of 0..{phi.shape[0]-1}")
    return phi


def write_seeds(path, seeds: np.ndarray) -> None:
    arr = np.asarray(seeds, dtype=np.int64).reshape(-1, 2)
    with open(path, "w") as fh:
        for u, v in arr.tolist():
            fh.write(f"{u} {v}\n")


def read_seeds(path) -> np.ndarray:
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v'")
            pairs.append((int(parts[0]), int(parts[1])))
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def identity_seeds(vertices) -> np.ndarray:
    """Seed pairs (u, u) for each u, i.e. known identity correspondences."""
    v = np.asarray(vertices, dtype=np.int64)
    return np.stack([v, v], axis=1)


__all__ = [
    "MatchResult",
    "solve_lap",
    "faq_match",
    "sgm_match",
    "match_and_align",
    "transposition_sweep",
    "write_permutation",
    "read_permutation",
    "write_seeds",
    "read_seeds",
    "identity_seeds",
]
