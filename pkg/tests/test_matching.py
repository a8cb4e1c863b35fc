import itertools

import numpy as np
import pytest

from corrmatch import (
    apply_permutation,
    er_params,
    faq_match,
    gm_objective,
    identity_permutation,
    identity_seeds,
    invert_permutation,
    match_and_align,
    read_permutation,
    read_seeds,
    sample_edge_correlation,
    sample_rho_sbm,
    sample_subset_shuffle,
    sample_uniform_permutation,
    sgm_match,
    solve_lap,
    transposition_delta,
    transposition_sweep,
    trace_objective,
    write_permutation,
    write_seeds,
)
from corrmatch.graphs import BlockPartition, graph_from_edges
from corrmatch.samplers import RngStream


def random_graph(n, p, rng):
    u = rng.random((n, n))
    a = np.triu((u < p).astype(np.int8), k=1)
    return a + a.T


def brute_force_lap(cost):
    """Exhaustive minimum over all assignments; also returns the
    lexicographically smallest optimal assignment."""
    n = cost.shape[0]
    best_val = None
    best_perm = None
    for perm in itertools.permutations(range(n)):
        val = sum(cost[i, perm[i]] for i in range(n))
        if best_val is None or val < best_val - 1e-12 or (
                abs(val - best_val) <= 1e-12 and perm < best_perm):
            best_val, best_perm = val, perm
    return np.array(best_perm), best_val


class TestSolveLap:
    def test_zero_matrix_identity(self):
        perm, total = solve_lap(np.zeros((5, 5)))
        assert perm.tolist() == [0, 1, 2, 3, 4]
        assert total == 0.0

    def test_two_by_two_swap(self):
        perm, total = solve_lap(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert perm.tolist() == [1, 0]
        assert total == 0.0

    def test_random_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            cost = rng.normal(size=(7, 7))
            perm, total = solve_lap(cost)
            _, best_val = brute_force_lap(cost)
            assert total == best_val
            assert cost[np.arange(7), perm].sum() == best_val

    def test_lexicographic_tie_break(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            cost = rng.integers(0, 3, size=(5, 5)).astype(float)
            perm, total = solve_lap(cost, lexicographic=True)
            lex_perm, best_val = brute_force_lap(cost)
            assert total == pytest.approx(best_val, abs=1e-9)
            assert perm.tolist() == lex_perm.tolist()

    def test_fast_path_still_optimal(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            cost = rng.normal(size=(6, 6))
            perm, total = solve_lap(cost, lexicographic=False)
            _, best_val = brute_force_lap(cost)
            assert total == best_val

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            solve_lap(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            solve_lap(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestFaqMatch:
    def test_self_match_from_identity(self):
        rng = np.random.default_rng(3)
        a = random_graph(15, 0.4, rng)
        res = faq_match(a, a, init="identity")
        assert res.objective == 0
        assert res.iterations == 1
        assert res.converged
        assert np.array_equal(res.permutation, identity_permutation(15))

    def test_start_at_planted_optimum(self):
        rng = np.random.default_rng(4)
        a = random_graph(20, 0.4, rng)
        sigma = rng.permutation(20)
        b = apply_permutation(a, sigma)
        res = faq_match(a, b, init=invert_permutation(sigma))
        assert res.objective == 0

    def test_objective_fields_consistent(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = random_graph(12, 0.4, rng)
            b = random_graph(12, 0.4, rng)
            res = faq_match(a, b)
            assert res.objective == gm_objective(a, b, res.permutation)
            assert res.trace_value == trace_objective(a, b, res.permutation)

    def test_trace_nondecreasing(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = random_graph(14, 0.5, rng)
            b = random_graph(14, 0.5, rng)
            res = faq_match(a, b)
            trace = res.objective_trace
            assert all(t2 >= t1 - 1e-9 for t1, t2 in zip(trace, trace[1:]))

    def test_bad_init_rejected(self):
        a = graph_from_edges(3, [(0, 1)])
        with pytest.raises(ValueError):
            faq_match(a, a, init="nonsense")
        with pytest.raises(ValueError):
            faq_match(a, a, init=np.array([0, 0, 1]))

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            faq_match(graph_from_edges(3, []), graph_from_edges(4, []))


class TestSgmMatch:
    def test_all_seeded_returns_stated_correspondence(self):
        rng = np.random.default_rng(7)
        a = random_graph(8, 0.5, rng)
        sigma = rng.permutation(8)
        b = apply_permutation(a, sigma)
        seeds = np.stack([np.arange(8), sigma[np.arange(8)]], axis=1)
        res = sgm_match(a, b, seeds=seeds)
        assert res.objective == 0
        assert res.iterations == 0
        assert res.converged

    def test_planted_shuffle_recovered_with_seeds(self):
        gen = RngStream(8).generator()
        a, b = sample_rho_sbm(er_params(80, 0.3), 1.0, gen)
        sigma = sample_subset_shuffle(80, np.arange(10), 70, gen)
        b_sh = apply_permutation(b, sigma)
        res = sgm_match(a, b_sh, seeds=identity_seeds(np.arange(10)))
        assert res.objective == 0
        assert np.array_equal(res.permutation, invert_permutation(sigma))

    def test_empty_seeds_equals_faq(self):
        rng = np.random.default_rng(9)
        a = random_graph(12, 0.4, rng)
        b = random_graph(12, 0.4, rng)
        r1 = sgm_match(a, b, seeds=None)
        r2 = faq_match(a, b)
        assert np.array_equal(r1.permutation, r2.permutation)
        assert r1.objective_trace == r2.objective_trace

    def test_seeds_are_fixed_points(self):
        gen = RngStream(10).generator()
        a, b = sample_rho_sbm(er_params(30, 0.4), 0.8, gen)
        sigma = sample_subset_shuffle(30, [2, 11, 17], 27, gen)
        b_sh = apply_permutation(b, sigma)
        res = sgm_match(a, b_sh, seeds=identity_seeds([2, 11, 17]))
        for v in (2, 11, 17):
            assert res.permutation[v] == v

    def test_conflicting_seeds_rejected(self):
        a = graph_from_edges(4, [(0, 1)])
        with pytest.raises(ValueError):
            sgm_match(a, a, seeds=[(0, 1), (0, 2)])
        with pytest.raises(ValueError):
            sgm_match(a, a, seeds=[(0, 1), (2, 1)])

    def test_permutation_init_with_seeds(self):
        gen = RngStream(40).generator()
        a, b = sample_rho_sbm(er_params(30, 0.4), 1.0, gen)
        sigma = sample_subset_shuffle(30, [0, 1, 2], 27, gen)
        b_sh = apply_permutation(b, sigma)
        res = sgm_match(a, b_sh, seeds=identity_seeds([0, 1, 2]),
                        init=invert_permutation(sigma))
        assert res.objective == 0

    def test_permutation_init_must_respect_seeds(self):
        gen = RngStream(41).generator()
        a, b = sample_rho_sbm(er_params(10, 0.5), 0.5, gen)
        bad = np.roll(np.arange(10), 1)  # maps a seed target onto a non-seed
        with pytest.raises(ValueError):
            sgm_match(a, b, seeds=identity_seeds([0]), init=bad)


class TestMatchAndAlign:
    def test_self_alignment(self):
        rng = np.random.default_rng(11)
        a = random_graph(10, 0.5, rng)
        assert np.array_equal(match_and_align(a, a, init="identity"), a)

    def test_isomorphic_pair_with_seeds(self):
        gen = RngStream(12).generator()
        a, b = sample_rho_sbm(er_params(60, 0.3), 1.0, gen)
        sigma = sample_subset_shuffle(60, np.arange(8), 52, gen)
        b_sh = apply_permutation(b, sigma)
        aligned = match_and_align(a, b_sh, seeds=identity_seeds(np.arange(8)))
        assert np.array_equal(aligned, a)

    def test_matching_raises_correlation_of_independent_pair(self):
        corr_matched = []
        corr_shuffled = []
        for i in range(10):
            gen = RngStream(13, i).generator()
            a, b = sample_rho_sbm(er_params(60, 0.4), 0.0, gen)
            sigma = sample_uniform_permutation(60, gen)
            b_sh = apply_permutation(b, sigma)
            aligned = match_and_align(a, b_sh, init="barycenter")
            corr_matched.append(sample_edge_correlation(a, aligned))
            corr_shuffled.append(sample_edge_correlation(a, b_sh))
        assert np.mean(corr_matched) >= np.mean(corr_shuffled)


class TestTranspositionSweep:
    def test_identical_pair_without_twins(self):
        # path graph: distinct neighborhoods, all deltas positive
        n = 8
        g = graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])
        part = BlockPartition((n,))
        found, pair, delta = transposition_sweep(g, g, part)
        assert not found
        assert delta > 0

    def test_best_matches_o_n_formula(self):
        rng = np.random.default_rng(14)
        part = BlockPartition((6, 6))
        for _ in range(20):
            a = random_graph(12, 0.5, rng)
            b = random_graph(12, 0.5, rng)
            found, (i, j), delta = transposition_sweep(a, b, part)
            assert delta == transposition_delta(a, b, i, j)
            # exhaustive scan oracle
            best = min(
                transposition_delta(a, b, u, v)
                for blk in range(2)
                for u, v in itertools.combinations(part.block_vertices(blk).tolist(), 2)
            )
            assert delta == best
            assert found == (best < 0)

    def test_no_eligible_pairs(self):
        g = graph_from_edges(2, [(0, 1)])
        found, pair, delta = transposition_sweep(g, g, BlockPartition((1, 1)))
        assert not found and pair is None


class TestMatchingFiles:
    def test_permutation_round_trip(self, tmp_path):
        phi = np.array([2, 0, 1, 3])
        path = tmp_path / "perm.txt"
        write_permutation(path, phi)
        assert np.array_equal(read_permutation(path), phi)

    def test_permutation_validated(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0\n0\n1\n")
        with pytest.raises(ValueError):
            read_permutation(path)

    def test_seed_file_round_trip(self, tmp_path):
        seeds = np.array([[0, 3], [2, 1]])
        path = tmp_path / "seeds.txt"
        write_seeds(path, seeds)
        assert np.array_equal(read_seeds(path), seeds)
