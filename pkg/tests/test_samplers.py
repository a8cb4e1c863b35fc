import math

import numpy as np
import pytest

from corrmatch import (
    BlockPartition,
    HeterogeneousPair,
    RngStream,
    SbmParams,
    anomaly_perturb,
    apply_permutation,
    er_params,
    gm_objective,
    invert_permutation,
    max_feasible_correlation,
    sample_block_permutation,
    sample_correlated_heterogeneous,
    sample_dirichlet_positions,
    sample_edge_correlation,
    sample_rho_bipartite,
    sample_rho_sbm,
    sample_sbm,
    sample_subset_shuffle,
    sample_uniform_permutation,
    shuffle_pair,
)
from corrmatch.graphs import as_adjacency


class TestSbmSampler:
    def test_all_zero_lambda(self):
        params = er_params(20, 0.0)
        g = sample_sbm(params, RngStream(1))
        assert g.sum() == 0

    def test_all_one_lambda(self):
        params = er_params(10, 1.0)
        g = sample_sbm(params, RngStream(2))
        assert g.sum() == 10 * 9

    def test_output_is_valid_adjacency(self):
        params = SbmParams(BlockPartition((5, 5)), np.array([[0.9, 0.1], [0.1, 0.9]]))
        g = sample_sbm(params, RngStream(3))
        as_adjacency(g)

    def test_edge_count_within_4_sigma(self):
        # |E| ~ Binomial(C(100,2), 0.5)
        params = er_params(100, 0.5)
        m = 100 * 99 // 2
        counts = [int(sample_sbm(params, RngStream(4, i)).sum()) // 2 for i in range(100)]
        mean = np.mean(counts)
        sigma_of_mean = math.sqrt(m * 0.25 / 100)
        assert abs(mean - 0.5 * m) < 4 * sigma_of_mean

    def test_block_rates(self):
        params = SbmParams(BlockPartition((40, 40)), np.array([[0.8, 0.1], [0.1, 0.8]]))
        g = sample_sbm(params, RngStream(5))
        cross = g[:40, 40:].mean()
        within = g[:40, :40][np.triu_indices(40, 1)].mean()
        assert abs(cross - 0.1) < 0.08
        assert abs(within - 0.8) < 0.08


class TestRhoSbm:
    def test_rho_one_identical(self):
        params = er_params(30, 0.4)
        a, b = sample_rho_sbm(params, 1.0, RngStream(6))
        assert np.array_equal(a, b)

    def test_rho_zero_near_independence(self):
        params = er_params(200, 0.5)
        corrs = [sample_edge_correlation(*sample_rho_sbm(params, 0.0, RngStream(7, i)))
                 for i in range(30)]
        assert abs(np.mean(corrs)) < 0.01

    def test_mean_sample_correlation_matches_rho(self):
        params = er_params(200, 0.5)
        corrs = [sample_edge_correlation(*sample_rho_sbm(params, 0.3, RngStream(8, i)))
                 for i in range(100)]
        assert abs(np.mean(corrs) - 0.3) < 0.02

    def test_joint_table_within_4_sigma(self):
        # cellwise joint of (G1, G2) edge indicators vs the construction table
        p, rho = 0.4, 0.6
        params = er_params(80, p)
        m = 80 * 79 // 2
        iu = np.triu_indices(80, 1)
        n11 = n10 = n01 = n00 = 0
        reps = 40
        for i in range(reps):
            a, b = sample_rho_sbm(params, rho, RngStream(9, i))
            x, y = a[iu], b[iu]
            n11 += int(((x == 1) & (y == 1)).sum())
            n10 += int(((x == 1) & (y == 0)).sum())
            n01 += int(((x == 0) & (y == 1)).sum())
            n00 += int(((x == 0) & (y == 0)).sum())
        total = m * reps
        p11 = p * (p + rho * (1 - p))
        for observed, expected in ((n11, p11), (n10, p - p11), (n01, p - p11),
                                   (n00, 1 - 2 * p + p11)):
            sd = math.sqrt(total * expected * (1 - expected))
            assert abs(observed - total * expected) < 4 * sd

    def test_marginal_density(self):
        params = er_params(150, 0.3)
        m = 150 * 149 // 2
        dens = []
        for i in range(50):
            a, b = sample_rho_sbm(params, 0.7, RngStream(10, i))
            dens.append(int(b.sum()) // 2 / m)
        sd_mean = math.sqrt(0.3 * 0.7 / m / 50)
        assert abs(np.mean(dens) - 0.3) < 4 * sd_mean

    def test_rho_out_of_range(self):
        with pytest.raises(ValueError):
            sample_rho_sbm(er_params(5, 0.5), 1.5, RngStream(0))


class TestRhoBipartite:
    def test_rho_one_identical(self):
        a, b = sample_rho_bipartite(8, 13, 0.5, 1.0, RngStream(11))
        assert a.shape == (8, 13)
        assert np.array_equal(a, b)

    def test_p_zero_empty(self):
        a, b = sample_rho_bipartite(6, 7, 0.0, 0.3, RngStream(12))
        assert a.sum() == 0 and b.sum() == 0

    def test_cell_correlation_near_rho(self):
        rs = []
        for i in range(60):
            a, b = sample_rho_bipartite(30, 40, 0.4, 0.5, RngStream(13, i))
            x = a.ravel().astype(float)
            y = b.ravel().astype(float)
            rs.append(np.corrcoef(x, y)[0, 1])
        assert abs(np.mean(rs) - 0.5) < 0.03


class TestMaxFeasibleCorrelation:
    def test_equal_marginals(self):
        assert max_feasible_correlation(0.3, 0.3) == pytest.approx(1.0)

    def test_formula_case(self):
        val = max_feasible_correlation(0.4, 0.375)
        assert val == pytest.approx(math.sqrt(0.225 / 0.25), abs=1e-12)
        # the implied joint table is valid: P(1,1) <= min(p, q)
        p, q, rho = 0.4, 0.375, val
        p11 = p * q + rho * math.sqrt(p * (1 - p) * q * (1 - q))
        assert p11 <= min(p, q) + 1e-12

    def test_degenerate(self):
        assert max_feasible_correlation(0.5, 0.0) == 0.0
        assert max_feasible_correlation(1.0, 0.5) == 0.0

    def test_symmetry_and_array(self):
        p = np.array([[0.0, 0.2], [0.2, 0.0]])
        q = np.array([[0.0, 0.5], [0.5, 0.0]])
        out = max_feasible_correlation(p, q)
        assert out[0, 1] == pytest.approx(max_feasible_correlation(0.2, 0.5))
        assert out[0, 0] == 0.0


class TestHeterogeneous:
    def _const_pair(self, n, p, q, rho):
        off = 1.0 - np.eye(n)
        return HeterogeneousPair(p * off, q * off, rho * off)

    def test_identical_when_equal_and_maximal(self):
        spec = self._const_pair(25, 0.4, 0.4, 1.0)
        a, b = sample_correlated_heterogeneous(spec, RngStream(14))
        assert np.array_equal(a, b)

    def test_rho_zero_independent(self):
        spec = self._const_pair(120, 0.4, 0.4, 0.0)
        corrs = [sample_edge_correlation(*sample_correlated_heterogeneous(spec, RngStream(15, i)))
                 for i in range(40)]
        assert abs(np.mean(corrs)) < 0.015

    def test_joint_cell_frequency(self):
        # P(1,1) = 0.15 + 0.7*sqrt(0.4*0.6*0.375*0.625) ~ 0.3160
        p, q, rho = 0.4, 0.375, 0.7
        p11 = p * q + rho * math.sqrt(p * (1 - p) * q * (1 - q))
        assert p11 == pytest.approx(0.316, abs=5e-4)
        spec = self._const_pair(60, p, q, rho)
        iu = np.triu_indices(60, 1)
        hits = 0
        total = 0
        for i in range(60):
            a, b = sample_correlated_heterogeneous(spec, RngStream(16, i))
            hits += int(((a[iu] == 1) & (b[iu] == 1)).sum())
            total += iu[0].size
        sd = math.sqrt(total * p11 * (1 - p11))
        assert abs(hits - total * p11) < 3 * sd

    def test_equal_marginals_match_rho_sbm_table(self):
        # with p = q the bivariate table reduces to the sequential
        # construction: Y|X=1 ~ Bern(p + rho(1-p)), Y|X=0 ~ Bern(p(1-rho))
        for p in (0.1, 0.3, 0.5, 0.8):
            for rho in (0.0, 0.25, 0.7):
                p11 = p * p + rho * math.sqrt((p * (1 - p)) ** 2)
                c1 = p11 / p
                c0 = (p - p11) / (1 - p)
                assert c1 == pytest.approx(p + rho * (1 - p), abs=1e-15)
                assert c0 == pytest.approx(p * (1 - rho), abs=1e-15)
        # and the drawn pairs coincide on a shared stream
        spec = self._const_pair(30, 0.3, 0.3, 0.5)
        ah, bh = sample_correlated_heterogeneous(spec, RngStream(55))
        ar, br = sample_rho_sbm(er_params(30, 0.3), 0.5, RngStream(55))
        assert np.array_equal(ah, ar) and np.array_equal(bh, br)

    def test_infeasible_rho_rejected(self):
        off = 1.0 - np.eye(4)
        with pytest.raises(ValueError):
            HeterogeneousPair(0.4 * off, 0.375 * off, 0.99 * off)


class TestLatentPositions:
    def test_rows_on_simplex(self):
        x = sample_dirichlet_positions(50, RngStream(17))
        assert x.shape == (50, 3)
        assert np.allclose(x.sum(axis=1), 1.0)
        assert (x >= 0).all()

    def test_mean_row(self):
        x = sample_dirichlet_positions(20000, RngStream(18))
        assert np.allclose(x.mean(axis=0), [1 / 3] * 3, atol=0.01)

    def test_gram_entries_in_unit_interval(self):
        x = sample_dirichlet_positions(40, RngStream(19))
        p = x @ x.T
        assert (p > 0).all() and (p <= 1).all()

    def test_anomaly_perturb_identity_cases(self):
        x = sample_dirichlet_positions(10, RngStream(20))
        assert np.array_equal(anomaly_perturb(x, 5, 0.0, RngStream(21)), x)
        assert np.array_equal(anomaly_perturb(x, 0, 0.5, RngStream(22)), x)

    def test_anomaly_perturb_stays_on_simplex(self):
        x = sample_dirichlet_positions(10, RngStream(23))
        y = anomaly_perturb(x, 4, 0.2, RngStream(24))
        assert np.allclose(y.sum(axis=1), 1.0)
        assert np.array_equal(y[4:], x[4:])
        assert not np.array_equal(y[:4], x[:4])


class TestPermutationSamplers:
    def test_n1_identity(self):
        assert sample_uniform_permutation(1, RngStream(25)).tolist() == [0]

    def test_block_permutation_preserves_membership(self):
        part = BlockPartition((5, 7, 3))
        for i in range(20):
            phi = sample_block_permutation(part, RngStream(26, i))
            assert np.array_equal(part.membership[phi], part.membership)

    def test_subset_shuffle_fixes_seeds(self):
        for i in range(20):
            phi = sample_subset_shuffle(12, [0, 3, 7], 5, RngStream(27, i))
            assert phi[0] == 0 and phi[3] == 3 and phi[7] == 7
            assert np.array_equal(np.sort(phi), np.arange(12))

    def test_subset_shuffle_moves_at_most_k(self):
        for i in range(20):
            phi = sample_subset_shuffle(10, [], 4, RngStream(28, i))
            assert int((phi != np.arange(10)).sum()) <= 4

    def test_subset_too_large(self):
        with pytest.raises(ValueError):
            sample_subset_shuffle(5, [0, 1], 4, RngStream(29))


class TestShufflePair:
    def test_identity_sigma(self):
        params = er_params(10, 0.5)
        pair = sample_rho_sbm(params, 0.5, RngStream(30))
        g1, g2s = shuffle_pair(pair, np.arange(10))
        assert np.array_equal(g2s, pair[1])

    def test_shuffle_then_unshuffle(self):
        params = er_params(10, 0.5)
        pair = sample_rho_sbm(params, 0.5, RngStream(31))
        sigma = sample_uniform_permutation(10, RngStream(32))
        _, g2s = shuffle_pair(pair, sigma)
        assert np.array_equal(apply_permutation(g2s, invert_permutation(sigma)), pair[1])

    def test_isomorphic_with_witness(self):
        params = er_params(15, 0.4)
        a, b = sample_rho_sbm(params, 1.0, RngStream(33))
        sigma = sample_uniform_permutation(15, RngStream(34))
        _, b_sh = shuffle_pair((a, b), sigma)
        assert gm_objective(a, b_sh, invert_permutation(sigma)) == 0


class TestDeterminism:
    def test_identical_streams_identical_draws(self):
        params = SbmParams(BlockPartition((6, 6)), np.array([[0.5, 0.2], [0.2, 0.6]]))
        a1, b1 = sample_rho_sbm(params, 0.4, RngStream(99, 7))
        a2, b2 = sample_rho_sbm(params, 0.4, RngStream(99, 7))
        assert np.array_equal(a1, a2) and np.array_equal(b1, b2)

    def test_distinct_streams_differ(self):
        params = er_params(40, 0.5)
        a1, _ = sample_rho_sbm(params, 0.4, RngStream(99, 0))
        a2, _ = sample_rho_sbm(params, 0.4, RngStream(99, 1))
        assert not np.array_equal(a1, a2)
