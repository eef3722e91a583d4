import numpy as np
import pytest
from scipy import stats

import metaforge as mf
from metaforge import Encoding
from metaforge.errors import EvaluationFailure, InvalidGraph, UnknownBaseline
from metaforge.problems import ProblemInstance, make_onemax


def reinit_graph():
    return mf.build_chain(Encoding.DISCRETE, "choose_traverse", ["reinit_discrete"], "update_greedy")


class TestSolveBasics:
    def test_budget_exhausted_at_init(self):
        rec = mf.solve(reinit_graph(), make_onemax(10), mf.SolveConfig(population_size=20, max_fe=20, seed=0))
        assert len(rec.trajectory) == 1
        assert rec.trajectory[0][0] == 20

    def test_fe_accounting_exact(self):
        calls = {"n": 0}
        base = make_onemax(12)

        def counting(g):
            calls["n"] += 1
            return base.evaluate(g)

        inst = ProblemInstance(base.spec, counting, "count-onemax")
        rec = mf.solve(reinit_graph(), inst, mf.SolveConfig(population_size=10, max_fe=105, seed=0))
        assert calls["n"] == rec.final_fe
        assert rec.final_fe == 100  # 10 init + 9 full iterations

    def test_reproducible_bit_identical(self, roulette_reset_graph):
        cfg = mf.SolveConfig(population_size=20, max_fe=1000, seed=77)
        a = mf.solve(roulette_reset_graph, make_onemax(30), cfg)
        b = mf.solve(roulette_reset_graph, make_onemax(30), cfg)
        assert a.trajectory == b.trajectory
        assert np.array_equal(a.final_population.genomes, b.final_population.genomes)

    def test_trajectory_monotone_non_increasing(self, niching_uniform_graph):
        rec = mf.solve(niching_uniform_graph, make_onemax(25),
                       mf.SolveConfig(population_size=10, max_fe=800, seed=3))
        fes = [fe for fe, _ in rec.trajectory]
        fits = [f for _, f in rec.trajectory]
        assert all(a < b for a, b in zip(fes, fes[1:]))
        assert all(a >= b for a, b in zip(fits, fits[1:]))
        assert rec.final_fe <= 800

    def test_invalid_graph_rejected(self):
        g = mf.build_chain(Encoding.CONTINUOUS, "choose_traverse", ["search_mu_gaussian"], "update_greedy")
        with pytest.raises(InvalidGraph):
            mf.solve(g, make_onemax(5), mf.SolveConfig(population_size=5, max_fe=50, seed=0))

    def test_evaluation_failure_carries_fe(self):
        base = make_onemax(6)

        def exploding(g):
            raise RuntimeError("bad instance data")

        inst = ProblemInstance(base.spec, exploding, "exploder")
        with pytest.raises(EvaluationFailure) as exc:
            mf.solve(reinit_graph(), inst, mf.SolveConfig(population_size=4, max_fe=40, seed=0))
        assert exc.value.fe == 0

    def test_trajectory_csv_shape(self, roulette_reset_graph):
        rec = mf.solve(roulette_reset_graph, make_onemax(10),
                       mf.SolveConfig(population_size=10, max_fe=100, seed=0))
        lines = rec.trajectory_csv().strip().splitlines()
        assert lines[0] == "fe,best_fitness"
        assert len(lines) == len(rec.trajectory) + 1


class TestPathways:
    def test_two_pathway_graph_preserves_population_size(self):
        vs = (
            mf.Vertex(0, "choose_traverse", {}),
            mf.Vertex(1, "search_reset_one", {}),
            mf.Vertex(2, "search_reset_rand", {"rate": 0.2}),
            mf.Vertex(3, "update_greedy", {}),
        )
        g = mf.AlgorithmGraph(Encoding.DISCRETE, vs, ((0, 1), (0, 2), (1, 3), (2, 3)), 0)
        rec = mf.solve(g, make_onemax(15), mf.SolveConfig(population_size=12, max_fe=600, seed=5))
        assert rec.final_population.size == 12

    def test_fanout_mid_chain(self):
        vs = (
            mf.Vertex(0, "choose_traverse", {}),
            mf.Vertex(1, "search_reset_rand", {"rate": 0.1}),
            mf.Vertex(2, "search_reset_one", {}),
            mf.Vertex(3, "search_reset_creep", {"rate": 0.3, "step": 1}),
            mf.Vertex(4, "update_greedy", {}),
        )
        g = mf.AlgorithmGraph(
            Encoding.DISCRETE, vs, ((0, 1), (1, 2), (1, 3), (2, 4), (3, 4)), 0
        )
        rec = mf.solve(g, make_onemax(15), mf.SolveConfig(population_size=10, max_fe=500, seed=9))
        assert rec.final_population.size == 10

    def test_loop_count_applies_operator_repeatedly(self):
        base = mf.build_chain(Encoding.DISCRETE, "choose_traverse", ["search_reset_one"], "update_always")
        v = base.vertices[1]
        looped = mf.AlgorithmGraph(
            base.encoding,
            (base.vertices[0], mf.Vertex(v.id, v.component, dict(v.params), 3), base.vertices[2]),
            base.edges,
            base.entry,
        )
        inst = make_onemax(40)
        rng_cfg = mf.SolveConfig(population_size=30, max_fe=60, seed=2)
        rec = mf.solve(looped, inst, rng_cfg)
        # after exactly one iteration each member moved by <= 3 and >= 1 entities
        init = np.random.default_rng(np.uint64(rng_cfg.seed))
        start = inst.spec.sample(30, init)
        dist = np.sum(rec.final_population.genomes != start, axis=1)
        assert dist.max() <= 3 and dist.min() >= 1


class TestRandomSearchEquivalence:
    def test_reinit_graph_matches_pure_random_search(self):
        """Two-sample KS oracle: the reinit + greedy graph must match an
        explicit uniform random-search implementation (alpha = 0.01)."""
        inst = make_onemax(20)
        budget, pop = 2_000, 20
        graph_finals = []
        oracle_finals = []
        for seed in range(50):
            rec = mf.solve(reinit_graph(), inst, mf.SolveConfig(population_size=pop, max_fe=budget, seed=seed))
            graph_finals.append(rec.best_fitness)
            rng = np.random.default_rng(seed + 10_000)
            samples = inst.spec.sample(budget, rng)
            raw, _ = inst.evaluate_many(samples)
            oracle_finals.append(raw.min())
        stat, p = stats.ks_2samp(graph_finals, oracle_finals)
        assert p > 0.01

    def test_designed_graph_beats_random_search(self, roulette_reset_graph):
        """Paired Wilcoxon oracle at alpha = 0.05 over 20 seeds."""
        inst = make_onemax(50)
        designed, random_search = [], []
        for seed in range(20):
            cfg = mf.SolveConfig(population_size=50, max_fe=5_000, seed=seed)
            designed.append(mf.solve(roulette_reset_graph, inst, cfg).best_fitness)
            random_search.append(mf.solve(reinit_graph(), inst, cfg).best_fitness)
        assert np.median(designed) < np.median(random_search)
        stat, p = stats.wilcoxon(designed, random_search, alternative="less")
        assert p < 0.05


class TestBaselines:
    def test_ga_mutation_rate(self):
        ga = mf.make_baseline("GA", Encoding.DISCRETE)
        rates = [v.params.get("rate") for v in ga.vertices if v.component == "search_reset_rand"]
        assert rates == [0.2]

    def test_ils_three_line_body(self):
        ils = mf.make_baseline("ILS", Encoding.DISCRETE)
        body = mf.render_pseudocode(ils).splitlines()[2:-1]
        assert len(body) == 3

    @pytest.mark.parametrize("name", ["GA", "ILS", "SA", "RS"])
    @pytest.mark.parametrize("encoding", list(Encoding))
    def test_baselines_valid_in_all_encodings(self, name, encoding):
        g = mf.make_baseline(name, encoding)
        assert mf.validate_graph(g, mf.build_default_space(encoding)) == []

    def test_unknown_baseline(self):
        with pytest.raises(UnknownBaseline):
            mf.make_baseline("XYZ")

    def test_tabu_archive_blocks_repeats(self):
        g = mf.build_chain(
            Encoding.DISCRETE,
            "choose_traverse",
            ["search_reset_one"],
            "update_greedy",
            archives=[("archive_tabu", {"tenure": 5})],
        )
        rec = mf.solve(g, make_onemax(8), mf.SolveConfig(population_size=6, max_fe=120, seed=1))
        state = next(iter(rec.archives.values()))
        assert state is not None
