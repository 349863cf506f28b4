from itertools import combinations
from math import comb, sqrt

import numpy as np
import pytest
from scipy import stats

from theta_lab.cover import format_certificate, verify_theta_cover
from theta_lab.errors import InputError, PreconditionError
from theta_lab.gens import gen_balanced_hard, gen_random_bounded
from theta_lab.hypergraph import Hypergraph, complement_edges, is_independent, max_degree
from theta_lab.randcover import (
    BalancedConfig,
    GeneralConfig,
    TrialSampler,
    balanced_constant,
    balanced_cover,
    balanced_probability,
    balanced_trials,
    build_aux_graph,
    clean,
    general_constant,
    general_cover,
    general_delta,
    general_probability,
    general_trials,
    success_lower_bound,
    trial_sets,
)

from conftest import event_violations, planted_triple, random_hypergraph

FAN = Hypergraph(3, 5, [(0, 1, 2), (0, 1, 3), (0, 1, 4)])


def all_independent(G, cert):
    E = G.edge_array
    for start in range(0, cert.t, 4096):
        M = cert.membership(start, min(cert.t, start + 4096), G.n)
        if E.size and M[:, E].all(axis=2).any():
            return False
    return True


class TestConstants:
    def test_balanced(self):
        assert balanced_constant(3) == 2**5 * 3**4
        assert balanced_probability(8, 3) == pytest.approx(1 / (6 * sqrt(8)))
        assert balanced_trials(90, 8, 3) == int(np.ceil(2**5 * 3**4 * 8**1.5 * np.log(90)))

    @pytest.mark.parametrize("d,k", [(2, 2), (2, 3), (100, 3), (2, 6)])
    def test_balanced_probability_range(self, d, k):
        assert 0 < balanced_probability(d, k) <= 0.25

    def test_general(self):
        assert general_delta(3) == 1 / 64
        assert general_constant(3) == 6 * 64**3
        assert general_probability(6, 3) == pytest.approx(1 / (64 * sqrt(6)))
        assert general_trials(60, 6, 3) == int(np.ceil(6 * 64**3 * 6**1.5 * np.log(60)))
        assert success_lower_bound(6, 3) == pytest.approx(0.5 * (1 / (64 * sqrt(6))) ** 3)

    def test_config_validation(self):
        with pytest.raises(InputError):
            BalancedConfig(d=1)
        with pytest.raises(InputError):
            GeneralConfig(d=2)
        with pytest.raises(InputError):
            BalancedConfig(d=4, mode="sometimes")


class TestAuxGraph:
    def test_fan(self):
        assert build_aux_graph(FAN, 4).graph.edges == ((0, 1),)

    def test_threshold_exact(self):
        # pair (0, 1) has degree 3: in H iff 9 >= d
        assert build_aux_graph(FAN, 9).graph.edges == ((0, 1),)
        assert build_aux_graph(FAN, 10).graph.edges == ()

    def test_d_one_takes_all_subsets_of_edges(self):
        rng = np.random.default_rng(2)
        G = random_hypergraph(rng, 8, 3, 0.2)
        expected = sorted({s for e in G.edges for s in combinations(e, 2)})
        assert list(build_aux_graph(G, 1).graph.edges) == expected

    def test_degree_bound(self):
        for seed in range(30):
            d = 3 + seed % 6
            G = gen_random_bounded(14, d, 3 + seed % 2, seed)
            H = build_aux_graph(G, d).graph
            assert max_degree(H, 1) ** 2 <= (G.k - 1) ** 2 * d


class TestClean:
    def test_operation_one(self):
        assert clean((0, 1, 2), FAN, build_aux_graph(FAN, 4)) == (0, 1)

    def test_operation_two(self):
        G = Hypergraph(3, 3, [(0, 1, 2)])
        H = build_aux_graph(G, 4)
        assert H.graph.edges == ()
        assert clean((0, 1, 2), G, H) == (0, 1)

    def test_independent_unchanged(self):
        assert clean((0, 2, 3), FAN, build_aux_graph(FAN, 4)) == (0, 2, 3)

    def test_output_independent(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            G = random_hypergraph(rng, 10, 3, 0.3)
            H = build_aux_graph(G, int(rng.integers(1, 10)))
            W = tuple(v for v in range(10) if rng.random() < 0.7)
            X = clean(W, G, H)
            assert set(X) <= set(W)
            assert is_independent(G, X)

    @pytest.mark.parametrize("k,density", [(3, 0.03), (4, 0.008)])
    def test_safe_samples_keep_nonedge(self, k, density):
        rng = np.random.default_rng(k)
        checked = 0
        while checked < 40:
            triple = planted_triple(rng, 12, k, int(rng.integers(2, 10)), density)
            if triple is None:
                continue
            G, H, ebar, W = triple
            assert not event_violations(G, H.graph.edges, ebar, W)
            assert set(ebar) <= set(clean(W, G, H))
            checked += 1

    def test_safety_needs_k_at_least_3(self):
        # for k = 2 the outside vertex of a crossing edge can itself be in H
        G = Hypergraph(2, 5, [(0, 2), (0, 3), (1, 3)])
        H = build_aux_graph(G, 4)
        ebar, W = (3, 4), (0, 3, 4)
        assert H.graph.edges == ((0,), (3,))
        assert not event_violations(G, H.graph.edges, ebar, W)
        assert clean(W, G, H) == (0, 4)


class TestSampler:
    def test_mean_size(self):
        n, p = 30, 0.2
        s = TrialSampler(n, p, seed=3, min_size=0)
        sizes = np.concatenate([m.sum(axis=1) for _, m in s.blocks(10_000)])
        assert sizes.size == 10_000
        sigma = sqrt(n * p * (1 - p) / sizes.size)
        assert abs(sizes.mean() - p * n) <= 5 * sigma

    def test_vertex_marginals(self):
        n, p = 12, 0.3
        s = TrialSampler(n, p, seed=9, min_size=0)
        M = np.concatenate([m for _, m in s.blocks(20_000)])
        freq = M.mean(axis=0)
        sigma = sqrt(p * (1 - p) / M.shape[0])
        assert np.all(np.abs(freq - p) <= 5 * sigma)

    def test_sparse_sampling_law(self):
        # thinning to trials with >= 3 vertices: the rate of such trials and their sizes
        n, p, s_min = 20, 0.05, 3
        s = TrialSampler(n, p, seed=1, min_size=s_min)
        total = 2_000_000
        idx, sizes = [], []
        for trials, members in s.blocks(total):
            idx.append(trials)
            sizes.append(members.sum(axis=1))
        idx, sizes = np.concatenate(idx), np.concatenate(sizes)
        q = stats.binom.sf(s_min - 1, n, p)
        sigma = sqrt(total * q * (1 - q))
        assert abs(idx.size - total * q) <= 5 * sigma
        assert np.all(np.diff(idx) > 0) and idx[-1] < total
        assert sizes.min() >= s_min
        sizes_range = np.arange(s_min, n + 1)
        pmf = stats.binom.pmf(sizes_range, n, p) / q
        mean, var = (sizes_range * pmf).sum(), (sizes_range**2 * pmf).sum() - (sizes_range * pmf).sum() ** 2
        assert abs(sizes.mean() - mean) <= 5 * sqrt(var / sizes.size)

    def test_block_independent_of_order(self):
        s = TrialSampler(15, 0.1, seed=4, min_size=3)
        a = s.block(5)
        list(s.blocks(s.block_length * 3))
        b = s.block(5)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_bad_probability(self):
        with pytest.raises(InputError):
            TrialSampler(5, 0.0, seed=0)


class TestBalancedCover:
    def test_complete(self):
        cert = balanced_cover(Hypergraph.complete(3, 6), BalancedConfig(d=64))
        assert cert.t == 0 and cert.complete and cert.t_achieved == 0

    def test_empty_graph(self):
        G = Hypergraph.empty(3, 10)
        cert = balanced_cover(G, BalancedConfig(d=2, seed=1))
        assert cert.complete and verify_theta_cover(G, cert)
        assert cert.t_achieved <= balanced_trials(10, 2, 3)
        # nothing to delete: every emitted set is the raw sample
        s = TrialSampler(10, balanced_probability(2, 3), seed=1, min_size=3)
        trials, members = next(s.blocks())
        rows = [tuple(np.flatnonzero(r)) for r in members[: cert.t]]
        assert rows == list(cert)

    def test_balanced_hard_90(self):
        G = gen_balanced_hard(90, 8, 3, seed=1).hypergraph
        cert = balanced_cover(G, BalancedConfig(d=8, seed=1))
        assert cert.complete and cert.uncovered == 0
        assert cert.t_achieved <= int(np.ceil(2**5 * 3**4 * 8**1.5 * np.log(90)))
        assert verify_theta_cover(G, cert)
        assert int(cert.trial_index[-1]) + 1 == cert.t_achieved

    def test_not_balanced(self):
        G = Hypergraph(3, 7, [(0, 1, v) for v in range(2, 7)])
        with pytest.raises(PreconditionError) as err:
            balanced_cover(G, BalancedConfig(d=5))
        assert "Δ_2=5" in str(err.value)

    def test_fixed_t(self):
        G = gen_balanced_hard(30, 8, 3, seed=2).hypergraph
        cert = balanced_cover(G, BalancedConfig(d=8, seed=2, mode="fixed-t"))
        assert cert.t_achieved == balanced_trials(30, 8, 3)
        assert all_independent(G, cert)
        assert cert.complete == bool(verify_theta_cover(G, cert))

    def test_cap_reports_incomplete(self):
        G = gen_balanced_hard(90, 8, 3, seed=1).hypergraph
        cert = balanced_cover(G, BalancedConfig(d=8, seed=1, t_cap=1000))
        assert not cert.complete and cert.uncovered > 0
        assert cert.t_achieved == 1000
        assert all_independent(G, cert)


class TestGeneralCover:
    def test_complete(self):
        cert = general_cover(Hypergraph.complete(3, 6), GeneralConfig(d=10))
        assert cert.t == 0 and cert.complete

    def test_matching(self):
        G = Hypergraph(3, 12, [(0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11)])
        cert = general_cover(G, GeneralConfig(d=3, seed=0))
        assert cert.complete and verify_theta_cover(G, cert)

    def test_degree_too_large(self):
        G = Hypergraph(3, 9, [(0, 1, 2), (0, 3, 4), (0, 5, 6), (0, 7, 8)])
        with pytest.raises(PreconditionError) as err:
            general_cover(G, GeneralConfig(d=3))
        assert "Δ=4" in str(err.value)

    def test_random_bounded(self):
        G = gen_random_bounded(30, 4, 3, seed=5)
        cert = general_cover(G, GeneralConfig(d=4, seed=5))
        assert cert.complete and verify_theta_cover(G, cert)
        assert cert.t_achieved <= general_trials(30, 4, 3)

    def test_sets_are_cleaned_samples(self):
        G = gen_random_bounded(16, 3, 3, seed=1)
        H = build_aux_graph(G, 3)
        s = TrialSampler(16, general_probability(3, 3), seed=2, min_size=3)
        trials, members = s.block(0)
        _, sets = next(trial_sets(G, "general", 3, seed=2, trials=200_000, min_size=3))
        for W, X in zip(members, sets):
            assert tuple(np.flatnonzero(X)) == clean(tuple(np.flatnonzero(W)), G, H)


class TestDeterminism:
    @pytest.mark.parametrize("alg", ["balanced", "general"])
    def test_serial_equals_parallel(self, alg):
        G = gen_balanced_hard(60, 8, 3, seed=3).hypergraph
        if alg == "balanced":
            run = lambda w: balanced_cover(G, BalancedConfig(d=8, seed=7, workers=w))
        else:
            d = max(3, max_degree(G, 1))
            run = lambda w: general_cover(G, GeneralConfig(d=d, seed=7, workers=w))
        a, b, c = run(1), run(1), run(3)
        assert format_certificate(a) == format_certificate(b) == format_certificate(c)
        assert a.t_achieved == c.t_achieved

    def test_seed_matters(self):
        G = gen_balanced_hard(60, 8, 3, seed=3).hypergraph
        a = balanced_cover(G, BalancedConfig(d=8, seed=1))
        b = balanced_cover(G, BalancedConfig(d=8, seed=2))
        assert format_certificate(a) != format_certificate(b)

    def test_env_threads(self, monkeypatch):
        G = gen_balanced_hard(30, 8, 3, seed=3).hypergraph
        a = balanced_cover(G, BalancedConfig(d=8, seed=4))
        monkeypatch.setenv("THETA_LAB_THREADS", "4")
        b = balanced_cover(G, BalancedConfig(d=8, seed=4))
        assert format_certificate(a) == format_certificate(b)
