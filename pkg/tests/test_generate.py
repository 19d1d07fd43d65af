import numpy as np
import pytest

from generate import (
    GenSpec,
    InvalidGenSpecError,
    TooManyEdgesError,
    child_seed,
    floyd_sample,
    ordered_pair,
    random_mag,
    unordered_pair,
)


class TestPairDecoding:

    def test_ordered_pairs_cover_all_non_loops(self):
        n = 5
        u, v = ordered_pair(np.arange(n * (n - 1)), n)
        pairs = set(zip(u.tolist(), v.tolist()))
        assert len(pairs) == n * (n - 1)
        assert all(a != b for a, b in pairs)

    def test_unordered_pairs_cover_upper_triangle(self):
        n = 7
        u, v = unordered_pair(np.arange(n * (n - 1) // 2), n)
        assert list(zip(u.tolist(), v.tolist())) == [(a, b) for a in range(n) for b in range(a + 1, n)]


class TestFloydSample:

    def test_distinct_and_sorted(self):
        rng = np.random.Generator(np.random.PCG64(1))
        sample = floyd_sample(rng, 100, 40)
        assert len(set(sample.tolist())) == 40
        assert (np.diff(sample) > 0).all()
        assert sample.min() >= 0 and sample.max() < 100

    def test_full_population(self):
        rng = np.random.Generator(np.random.PCG64(2))
        assert floyd_sample(rng, 10, 10).tolist() == list(range(10))

    def test_too_many(self):
        rng = np.random.Generator(np.random.PCG64(3))
        with pytest.raises(TooManyEdgesError):
            floyd_sample(rng, 3, 4)

    def test_single_draws_are_uniform(self):
        rng = np.random.Generator(np.random.PCG64(4))
        draws = 2000
        counts = np.bincount([int(floyd_sample(rng, 3, 1)[0]) for _ in range(draws)], minlength=3)
        sd = np.sqrt(draws * (1 / 3) * (2 / 3))
        assert (np.abs(counts - draws / 3) <= 5 * sd).all()



class TestRandomMag:

    def test_exact_edge_count_without_loops(self):
        mag = random_mag(GenSpec((20, 5), 300, seed=4))
        assert mag.m == 300
        assert mag.n == 100
        assert not np.any(mag.sources == mag.targets)
        assert len(mag.edge_set()) == 300

    def test_same_seed_same_mag(self):
        assert random_mag(GenSpec((10, 3), 50, seed=9)) == random_mag(GenSpec((10, 3), 50, seed=9))

    def test_different_seed_different_mag(self):
        assert random_mag(GenSpec((10, 3), 50, seed=9)) != random_mag(GenSpec((10, 3), 50, seed=10))

    def test_complete_digraph(self):
        mag = random_mag(GenSpec((2, 2), 12, seed=0))
        assert mag.m == 12

    def test_too_many_edges(self):
        with pytest.raises(TooManyEdgesError):
            random_mag(GenSpec((2, 2), 13))

    def test_reciprocal_pairs(self):
        mag = random_mag(GenSpec((6, 2), 20, seed=5, reciprocal=True))
        edges = mag.edge_set()
        assert mag.m == 20
        assert all((v, u) in edges for u, v in edges)

    def test_reciprocal_needs_even_count(self):
        with pytest.raises(InvalidGenSpecError):
            random_mag(GenSpec((6, 2), 21, reciprocal=True))

    def test_reciprocal_pair_is_uniform_over_seeds(self):
        # three unordered pairs on three vertices, one drawn per seed
        draws = 2000
        counts = {}
        for seed in range(draws):
            mag = random_mag(GenSpec((3,), 2, seed=seed, reciprocal=True))
            pair = (int(mag.sources.min()), int(mag.sources.max()))
            counts[pair] = counts.get(pair, 0) + 1
        assert sorted(counts) == [(0, 1), (0, 2), (1, 2)]
        sd = np.sqrt(draws * (1 / 3) * (2 / 3))
        assert all(abs(c - draws / 3) <= 5 * sd for c in counts.values())


    def test_aspect_labels(self):
        mag = random_mag(GenSpec((3, 2), 2, seed=1))
        assert [a.name for a in mag.aspects] == ['aspect1', 'aspect2']
        assert mag.aspects[1].labels == ('1', '2')

    @pytest.mark.parametrize('sizes', [(), (3, 0)])
    def test_invalid_sizes(self, sizes):
        with pytest.raises(InvalidGenSpecError):
            GenSpec(sizes, 1)

    def test_parse_sizes(self):
        assert GenSpec.parse_sizes('1000,2,5') == (1000, 2, 5)
        with pytest.raises(InvalidGenSpecError):
            GenSpec.parse_sizes('1000x10')


class TestChildSeeds:

    def test_deterministic(self):
        assert child_seed(7, 3) == child_seed(7, 3)

    def test_distinct_per_index(self):
        seeds = {child_seed(7, i) for i in range(100)}
        assert len(seeds) == 100

    def test_fit_in_64_bits(self):
        assert 0 <= child_seed(2 ** 40, 5) < 2 ** 64
