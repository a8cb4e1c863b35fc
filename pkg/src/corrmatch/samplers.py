"""Random generation of correlated graph pairs, latent positions, and shuffles.

All sampling goes through :class:`RngStream`, a (master_seed, stream_id)
pair hashed through numpy's SeedSequence into a PCG64 generator. The
same stream always produces bit-identical output; distinct stream ids
give independent streams, so Monte Carlo replicates can be drawn in any
order or in parallel.

A correlated pair of Bernoulli(p), Bernoulli(q) indicators with Pearson
correlation rho is drawn from the bivariate table

    P(1,1) = p*q + rho * sqrt(p*(1-p)*q*(1-q)),

which reduces, for p = q, to the sequential construction: draw X, then
Y | X=1 ~ Bern(p + rho*(1-p)) and Y | X=0 ~ Bern(p*(1-rho)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import ADJ_DTYPE, BlockPartition, apply_permutation, identity_permutation


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable random stream.

    Generator derivation is pinned to
    ``PCG64(SeedSequence(master_seed, spawn_key=(stream_id,)))``; the
    SeedSequence hash is stable across platforms and numpy releases.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def stream(self, stream_id: int) -> "RngStream":
        """Sibling stream with the same master seed."""
        return RngStream(self.master_seed, stream_id)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


@dataclass(frozen=True)
class SbmParams:
    """Stochastic blockmodel parameters: block partition plus the
    symmetric K x K edge-probability matrix."""

    partition: BlockPartition
    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=np.float64)
        k = self.partition.num_blocks
        if lam.shape != (k, k):
            raise ValueError(f"lambda must be {k}x{k}, got {lam.shape}")
        if not np.allclose(lam, lam.T):
            raise ValueError("lambda must be symmetric")
        if lam.min() < 0.0 or lam.max() > 1.0:
            raise ValueError("lambda entries must lie in [0, 1]")
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.partition.n

    def edge_probability_matrix(self) -> np.ndarray:
        """n x n matrix P with P[u,v] = lambda[b(u), b(v)], zero diagonal."""
        b = self.partition.membership
        p = self.lam[np.ix_(b, b)]
        np.fill_diagonal(p, 0.0)
        return p


def er_params(n: int, p: float) -> SbmParams:
    """One-block SBM, i.e. Erdos-Renyi(n, p)."""
    return SbmParams(BlockPartition((n,)), np.array([[p]]))


@dataclass(frozen=True)
class HeterogeneousPair:
    """Edge-probability matrices (P, Q) with an entrywise correlation matrix."""

    p_matrix: np.ndarray
    q_matrix: np.ndarray
    rho_matrix: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_matrix, dtype=np.float64)
        q = np.asarray(self.q_matrix, dtype=np.float64)
        r = np.asarray(self.rho_matrix, dtype=np.float64)
        if not (p.shape == q.shape == r.shape) or p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("p, q, rho must be square matrices of equal shape")
        for name, m in (("p", p), ("q", q)):
            if not np.allclose(m, m.T):
                raise ValueError(f"{name} matrix must be symmetric")
            if m.min() < 0 or m.max() > 1:
                raise ValueError(f"{name} entries must lie in [0,1]")
            if np.any(np.diag(m) != 0):
                raise ValueError(f"{name} must have zero diagonal")
        if not np.allclose(r, r.T):
            raise ValueError("rho matrix must be symmetric")
        bound = max_feasible_correlation(p, q)
        if np.any(r > bound + 1e-12):
            raise ValueError("rho exceeds the feasible correlation bound somewhere")
        object.__setattr__(self, "p_matrix", p)
        object.__setattr__(self, "q_matrix", q)
        object.__setattr__(self, "rho_matrix", r)

    @property
    def n(self) -> int:
        return self.p_matrix.shape[0]


def max_feasible_correlation(p, q):
    """Largest correlation admitting a valid bivariate Bernoulli(p, q) table.

    min(sqrt(p(1-q)/(q(1-p))), sqrt(q(1-p)/(p(1-q)))). Degenerate
    marginals (0 or 1) give 0; equal non-degenerate marginals give 1.
    Accepts scalars or arrays (elementwise).
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    degenerate = (p <= 0) | (p >= 1) | (q <= 0) | (q >= 1)
    ps = np.where(degenerate, 0.5, p)
    qs = np.where(degenerate, 0.5, q)
    ratio = (ps * (1 - qs)) / (qs * (1 - ps))
    out = np.sqrt(np.minimum(ratio, 1.0 / ratio))
    out = np.where(degenerate, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def _sample_symmetric_bernoulli(prob: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Symmetric 0/1 matrix with independent upper-triangle Bernoulli cells."""
    n = prob.shape[0]
    u = gen.random((n, n))
    a = (u < prob).astype(ADJ_DTYPE)
    a = np.triu(a, k=1)
    return a + a.T


def sample_sbm(params: SbmParams, rng) -> np.ndarray:
    """One SBM draw: pair {j,l} adjacent with probability lambda[b(j), b(l)]."""
    gen = _as_generator(rng)
    return _sample_symmetric_bernoulli(params.edge_probability_matrix(), gen)


def sample_rho_sbm(params: SbmParams, rho: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Correlated SBM pair: draw G1, then G2 edgewise conditionally on G1.

    Conditional on an edge of G1 the matching G2 cell is Bernoulli
    (lam + rho*(1-lam)); conditional on a non-edge it is Bernoulli
    (lam*(1-rho)). Cells are independent across vertex pairs.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    gen = _as_generator(rng)
    p = params.edge_probability_matrix()
    a = _sample_symmetric_bernoulli(p, gen)
    cond = np.where(a == 1, p + rho * (1.0 - p), p * (1.0 - rho))
    b = _sample_symmetric_bernoulli(cond, gen)
    return a, b


def sample_rho_bipartite(m1: int, m2: int, p: float, rho: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Correlated bipartite pair: m1 x m2 biadjacency matrices, cellwise
    Bernoulli(p) with correlation rho across the two draws."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    gen = _as_generator(rng)
    a = (gen.random((m1, m2)) < p).astype(ADJ_DTYPE)
    cond = np.where(a == 1, p + rho * (1.0 - p), p * (1.0 - rho))
    b = (gen.random((m1, m2)) < cond).astype(ADJ_DTYPE)
    return a, b


def sample_correlated_heterogeneous(spec: HeterogeneousPair, rng) -> tuple[np.ndarray, np.ndarray]:
    """Heterogeneous correlated pair from cellwise bivariate Bernoulli tables.

    Cell {u,v} uses marginals (p_uv, q_uv) and correlation rho_uv via
    P(1,1) = pq + rho*sqrt(pq(1-p)(1-q)); cells are independent.
    """
    gen = _as_generator(rng)
    p = spec.p_matrix
    q = spec.q_matrix
    rho = spec.rho_matrix
    p11 = p * q + rho * np.sqrt(p * (1 - p) * q * (1 - q))
    if (np.any(p11 > np.minimum(p, q) + 1e-12) or np.any(p11 < -1e-12)
            or np.any(1 - p - q + p11 < -1e-12)):
        raise ValueError("infeasible correlation entry: joint table not a distribution")
    a = _sample_symmetric_bernoulli(p, gen)
    # Y | X=1 ~ Bern(p11/p), Y | X=0 ~ Bern((q - p11)/(1 - p))
    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = np.where(p > 0, p11 / p, 0.0)
        c0 = np.where(p < 1, (q - p11) / (1 - p), 0.0)
    cond = np.clip(np.where(a == 1, c1, c0), 0.0, 1.0)
    b = _sample_symmetric_bernoulli(cond, gen)
    return a, b


def sample_dirichlet_positions(n: int, rng, dim: int = 3) -> np.ndarray:
    """n latent positions drawn i.i.d. Dirichlet(1, ..., 1) on the simplex."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _as_generator(rng)
    return gen.dirichlet(np.ones(dim), size=n)


def anomaly_perturb(x: np.ndarray, m: int, w: float, rng) -> np.ndarray:
    """Mix the first m rows of x with fresh Dirichlet rows: (1-w)*x + w*D."""
    if not 0.0 <= w <= 1.0:
        raise ValueError("w must lie in [0, 1]")
    if m > x.shape[0]:
        raise ValueError("m exceeds the number of rows")
    gen = _as_generator(rng)
    y = np.array(x, dtype=np.float64, copy=True)
    if m > 0 and w > 0:
        d = gen.dirichlet(np.ones(x.shape[1]), size=m)
        y[:m] = (1.0 - w) * x[:m] + w * d
    return y


# -- permutations and shuffles ----------------------------------------------

def sample_uniform_permutation(n: int, rng) -> np.ndarray:
    gen = _as_generator(rng)
    return gen.permutation(n).astype(np.int64)


def sample_block_permutation(partition: BlockPartition, rng) -> np.ndarray:
    """Uniform block-preserving permutation: independent uniform
    permutation within each block."""
    gen = _as_generator(rng)
    phi = identity_permutation(partition.n)
    for i in range(partition.num_blocks):
        verts = partition.block_vertices(i)
        phi[verts] = verts[gen.permutation(verts.shape[0])]
    return phi


def sample_subset_shuffle(n: int, seed_set, k: int, rng) -> np.ndarray:
    """Uniform permutation of a uniformly chosen k-subset of non-seed vertices.

    Seeds are always fixed points. Because the subset permutation may
    itself fix points, *at most* k vertices move.
    """
    gen = _as_generator(rng)
    seeds = np.asarray(sorted(set(int(s) for s in seed_set)), dtype=np.int64)
    if seeds.size and (seeds.min() < 0 or seeds.max() >= n):
        raise ValueError("seed vertex out of range")
    free = np.setdiff1d(np.arange(n, dtype=np.int64), seeds, assume_unique=True)
    if k > free.shape[0]:
        raise ValueError(f"cannot shuffle {k} of {free.shape[0]} non-seed vertices")
    phi = identity_permutation(n)
    if k >= 2:
        chosen = gen.choice(free, size=k, replace=False)
        phi[chosen] = chosen[gen.permutation(k)]
    return phi


def shuffle_pair(pair: tuple[np.ndarray, np.ndarray], sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(G1, G2) -> (G1, sigma(G2))."""
    g1, g2 = pair
    if g1.shape != g2.shape:
        raise ValueError("graph size mismatch")
    return g1, apply_permutation(g2, sigma)
