import numpy as np
import pytest

import metaforge as mf
from metaforge.errors import EncodingMismatch, UnknownProblem
from metaforge.problems import evaluate_benchmark, penalized_fitness
from metaforge.problems.registry import make_instances


class TestPenalty:
    def test_feasible_identity(self):
        assert penalized_fitness(3.0, 0.0, 1e6) == 3.0

    def test_arithmetic(self):
        assert penalized_fitness(3.0, 2.0, 1e6) == 2_000_003.0

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            penalized_fitness(1.0, -0.1)
        with pytest.raises(ValueError):
            penalized_fitness(1.0, 0.1, coeff=0.0)

    def test_feasible_always_outranks_infeasible(self):
        """Pairwise ordering oracle over 1,000 random pairs: any feasible
        raw fitness beats any infeasible one while |raw| < coeff x min
        violation."""
        rng = np.random.default_rng(0)
        coeff = 1e6
        for _ in range(1000):
            raw_f = rng.uniform(-1e3, 1e3)
            raw_i = rng.uniform(-1e3, 1e3)
            viol = rng.uniform(1e-2, 10.0)
            assert penalized_fitness(raw_f, 0.0, coeff) < penalized_fitness(raw_i, viol, coeff)


class TestBenchmarks:
    def test_sphere_origin(self):
        assert evaluate_benchmark("sphere", np.zeros(5)) == (0.0, 0.0)

    def test_onemax_all_ones(self):
        assert evaluate_benchmark("onemax", np.ones(20, dtype=np.int64)) == (-20.0, 0.0)

    def test_tsp_unit_square_perimeter(self):
        """Hand-computed oracle: unit square visited in order has tour
        length 4."""
        coords = [(0, 0), (0, 1), (1, 1), (1, 0)]
        inst = mf.make_tsp(coords=coords)
        raw, viol = inst.evaluate(np.array([0, 1, 2, 3]))
        assert raw == pytest.approx(4.0)
        assert viol == 0.0

    def test_rastrigin_optimum(self):
        raw, _ = evaluate_benchmark("rastrigin", np.zeros(4))
        assert raw == pytest.approx(0.0)

    def test_rosenbrock_optimum(self):
        raw, _ = evaluate_benchmark("rosenbrock", np.ones(6))
        assert raw == pytest.approx(0.0)

    def test_knapsack_violation_is_overweight(self):
        inst = mf.make_knapsack(10, seed=4)
        all_in = np.ones(10, dtype=np.int64)
        raw, viol = inst.evaluate(all_in)
        assert viol > 0  # capacity is half the total weight
        empty_raw, empty_viol = inst.evaluate(np.zeros(10, dtype=np.int64))
        assert empty_viol == 0.0 and empty_raw == 0.0

    def test_batch_matches_scalar(self):
        inst = mf.make_knapsack(12, seed=1)
        rng = np.random.default_rng(2)
        genomes = inst.spec.sample(30, rng)
        raw_b, viol_b = inst.evaluate_many(genomes)
        for g, r, v in zip(genomes, raw_b, viol_b):
            rs, vs = inst.evaluate(g)
            assert rs == pytest.approx(r) and vs == pytest.approx(v)

    def test_encoding_mismatch(self):
        with pytest.raises(EncodingMismatch):
            evaluate_benchmark("sphere", np.zeros(4, dtype=np.int64))
        with pytest.raises(EncodingMismatch):
            evaluate_benchmark("onemax", np.zeros(4))
        with pytest.raises(EncodingMismatch):
            evaluate_benchmark("tsp", np.array([0, 0, 1, 2]))

    def test_unknown_benchmark(self):
        with pytest.raises(UnknownProblem):
            evaluate_benchmark("nope", np.zeros(3))


class TestRegistry:
    def test_factories_produce_roles(self):
        train, test = make_instances("onemax", {"dim": 30}, 3, 2)
        assert len(train) == 3 and len(test) == 2
        assert all(i.role is mf.InstanceRole.TRAINING for i in train)
        assert all(i.role is mf.InstanceRole.TEST for i in test)
        ids = {i.instance_id for i in train + test}
        assert len(ids) == 5  # ids unique

    def test_knapsack_instances_differ(self):
        train, _ = make_instances("knapsack", {"dim": 15, "seed": 7}, 2, 0)
        g = np.ones(15, dtype=np.int64)
        assert train[0].evaluate(g) != train[1].evaluate(g)

    def test_beamforming_sizes_from_n_list(self):
        train, test = make_instances(
            "beamforming", {"n_list": [4, 6, 8], "bits": 1, "seed": 3}, 2, 1
        )
        assert [i.spec.dim for i in train] == [4, 6]
        assert [i.spec.dim for i in test] == [8]

    def test_unknown_problem(self):
        with pytest.raises(UnknownProblem):
            make_instances("mystery", {}, 1, 1)

    def test_template_problem_registered(self):
        import metaforge.problems.template  # noqa: F401

        train, test = make_instances("match", {"dim": 10, "seed": 1}, 2, 1)
        assert len(train) == 2 and len(test) == 1
        genome = train[0].spec.sample(1, np.random.default_rng(0))[0]
        raw, viol = train[0].evaluate(genome)
        assert 0 <= raw <= 10 and viol == 0.0
