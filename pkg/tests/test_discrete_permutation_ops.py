import numpy as np
import pytest

from metaforge import make_discrete
from metaforge.encodings import PermutationSpec
from metaforge.errors import EncodingMismatch
from metaforge.operators.discrete import (
    reinit_discrete,
    search_reset_creep,
    search_reset_one,
    search_reset_rand,
)
from metaforge.operators.permutation import (
    reinit_permutation,
    search_insert,
    search_scramble,
    search_swap,
    search_swap_multi,
)

PERM8 = PermutationSpec(8)


class TestDiscrete:
    def test_reset_rand_rate_zero_identity(self):
        spec = make_discrete(10, 5)
        rng = np.random.default_rng(0)
        parents = spec.sample(20, rng)
        out = search_reset_rand(parents, None, spec, {"rate": 0.0}, {}, rng)
        assert np.array_equal(out, parents)

    def test_reset_one_hamming_distance_exactly_one(self):
        spec = make_discrete(12, 4)
        rng = np.random.default_rng(1)
        for _ in range(100):
            parents = spec.sample(10, rng)
            out = search_reset_one(parents, None, spec, {}, {}, rng)
            assert np.all(np.sum(out != parents, axis=1) == 1)

    def test_reset_rand_binomial_expectation(self):
        """Expected changed entities = rate x (v-1)/v per dimension, within
        5% over 10,000 trials (rate pinned to 0.1342)."""
        rate, length, card = 0.1342, 100, 4
        spec = make_discrete(length, card)
        rng = np.random.default_rng(2)
        trials = 10_000
        parents = spec.sample(trials, rng)
        out = search_reset_rand(parents, None, spec, {"rate": rate}, {}, rng)
        mean_changed = np.mean(np.sum(out != parents, axis=1))
        expected = rate * length * (card - 1) / card
        assert mean_changed == pytest.approx(expected, rel=0.05)

    def test_creep_stays_in_cardinalities(self):
        spec = make_discrete(6, 3)
        rng = np.random.default_rng(3)
        parents = spec.sample(200, rng)
        out = search_reset_creep(parents, None, spec, {"rate": 1.0, "step": 3}, {}, rng)
        assert spec.contains(out)

    def test_creep_moves_by_small_steps(self):
        spec = make_discrete(4, 100)
        parents = np.full((50, 4), 50, dtype=np.int64)
        rng = np.random.default_rng(4)
        out = search_reset_creep(parents, None, spec, {"rate": 1.0, "step": 2}, {}, rng)
        deltas = np.abs(out - parents)
        assert deltas.max() <= 2 and deltas.min() >= 1

    def test_reinit_within_cardinalities(self):
        spec = make_discrete(5, [2, 3, 4, 5, 6])
        rng = np.random.default_rng(5)
        out = reinit_discrete(np.zeros((500, 5), dtype=np.int64), None, spec, {}, {}, rng)
        assert spec.contains(out)

    def test_discrete_ops_reject_permutations(self):
        perms = PERM8.sample(4, np.random.default_rng(0))
        with pytest.raises(EncodingMismatch):
            search_reset_one(perms, None, PERM8, {}, {}, np.random.default_rng(0))


class TestPermutation:
    def test_swap_fixed_indices(self, scripted_rng):
        rng = scripted_rng([1, 3])
        out = search_swap(np.array([[0, 1, 2, 3]]), None, PermutationSpec(4), {}, {}, rng)
        assert out.tolist() == [[0, 3, 2, 1]]

    def test_swap_differs_in_exactly_two_positions(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            parents = PERM8.sample(5, rng)
            out = search_swap(parents, None, PERM8, {}, {}, rng)
            assert np.all(np.sum(out != parents, axis=1) == 2)

    def test_scramble_preserves_multiset(self):
        """Multiset-equality oracle over 10,000 random permutations."""
        rng = np.random.default_rng(7)
        parents = PERM8.sample(10_000, rng)
        out = search_scramble(parents, None, PERM8, {}, {}, rng)
        assert np.array_equal(np.sort(out, axis=1), np.sort(parents, axis=1))
        assert PERM8.contains(out)

    def test_reinit_uniform_position_value_pairs(self):
        """Chi-square oracle: every (position, value) pair equally likely
        within 3 sigma over 100,000 draws."""
        length = 8
        spec = PermutationSpec(length)
        rng = np.random.default_rng(8)
        draws = 100_000
        out = reinit_permutation(np.zeros((draws, length), dtype=np.int64), None, spec, {}, {}, rng)
        assert spec.contains(out)
        p = 1.0 / length
        sigma = np.sqrt(draws * p * (1 - p))
        for pos in range(length):
            counts = np.bincount(out[:, pos], minlength=length)
            assert np.all(np.abs(counts - draws * p) <= 3 * sigma)

    @pytest.mark.parametrize(
        "fn", [search_swap, search_swap_multi, search_scramble, search_insert, reinit_permutation]
    )
    def test_outputs_are_permutations(self, fn):
        rng = np.random.default_rng(9)
        for _ in range(100):
            parents = PERM8.sample(6, rng)
            out = fn(parents, None, PERM8, {}, {}, rng)
            assert PERM8.contains(out)
            assert out.shape == parents.shape

    def test_swap_multi_reverses_segment(self, scripted_rng):
        rng = scripted_rng([1, 4])
        out = search_swap_multi(np.array([[0, 1, 2, 3, 4, 5]]), None, PermutationSpec(6), {}, {}, rng)
        assert out.tolist() == [[0, 4, 3, 2, 1, 5]]

    def test_insert_moves_second_after_first(self, scripted_rng):
        rng = scripted_rng([1, 3])  # entity at pos 3 goes right after entity at pos 1
        out = search_insert(np.array([[0, 1, 2, 3, 4]]), None, PermutationSpec(5), {}, {}, rng)
        assert out.tolist() == [[0, 1, 3, 2, 4]]

    def test_permutation_ops_reject_vectors(self):
        spec = make_discrete(8, 8)
        vecs = spec.sample(4, np.random.default_rng(0))
        with pytest.raises(EncodingMismatch):
            search_swap(vecs, None, spec, {}, {}, np.random.default_rng(0))
