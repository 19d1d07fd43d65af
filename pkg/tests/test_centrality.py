import numpy as np
import pytest

from centrality import (
    TooLargeError,
    UnknownClassError,
    betweenness_bruteforce,
    betweenness_composite,
    betweenness_subdet,
    betweenness_subdet_bruteforce,
    bfs_sssp,
    class_paths,
    closeness_composite,
    closeness_subdet,
    compute_centrality,
    merge_partials,
    path_statistics,
    path_statistics_subdet,
    sub_bfs,
)
from mag_core import CompositeDigraph, CompositeVertex, MagError, build_mag, to_digraph
from subdet import aggregate_mag
from tests.conftest import random_mags


def crossing_mag():
    """Class x is reached twice, at different instants; only (x|2) leads on to c."""
    return build_mag([('v', ['s', 'a', 'b', 'x', 'c']), ('t', ['1', '2'])], [
        ('s', '1', 'a', '1'),
        ('a', '1', 'x', '1'),
        ('s', '2', 'b', '2'),
        ('b', '2', 'x', '2'),
        ('x', '2', 'c', '2'),
    ])


def revisiting_mag():
    """The only way from s to t passes class c, leaves it and comes back through another member."""
    return build_mag([('v', ['s', 'c', 'y', 't']), ('t', ['1', '2'])], [
        ('s', '1', 'c', '1'),
        ('c', '1', 'y', '1'),
        ('y', '1', 'c', '2'),
        ('c', '2', 't', '2'),
    ])


class TestCompositeMeasures:

    def test_betweenness_of_r(self, mag_r):
        scores = betweenness_composite(to_digraph(mag_r))
        assert scores.scores.tolist() == [0, 0, 1, 1, 0, 0]
        assert scores.labels()[:2] == ['(1|T1)', '(2|T1)']

    def test_betweenness_of_aggregated_r(self, mag_r):
        assert betweenness_composite(aggregate_mag(mag_r, [1, 0])).scores.tolist() == [0, 1, 0]

    def test_split_paths_share_credit(self):
        # two shortest paths 0 -> {1, 2} -> 3
        g = CompositeDigraph.from_arcs(4, [0, 0, 1, 2], [1, 2, 3, 3])
        assert betweenness_composite(g).scores.tolist() == [0, 0.5, 0.5, 0]

    def test_directed_convention(self):
        g = CompositeDigraph.from_arcs(3, [0, 1], [1, 2])
        assert betweenness_composite(g).scores.tolist() == [0, 1, 0]

    def test_empty_graph(self):
        g = CompositeDigraph.from_arcs(4, [], [])
        assert betweenness_composite(g).scores.tolist() == [0, 0, 0, 0]
        assert closeness_composite(g).scores.tolist() == [0, 0, 0, 0]

    def test_partials_sum_to_full(self, mag_factory):
        for _, mag in mag_factory(5, seed=11, sizes_choices=[(4, 3)]):
            g = to_digraph(mag)
            halves = [betweenness_composite(g, sources=range(0, 6)),
                      betweenness_composite(g, sources=range(6, 12))]
            np.testing.assert_allclose(merge_partials(halves).scores, betweenness_composite(g).scores)

    def test_harmonic_closeness_of_aggregated_r(self, mag_r):
        scores = closeness_composite(aggregate_mag(mag_r, [1, 0]), mode='harmonic')
        assert scores.scores.tolist() == [1.5, 1, 0]

    def test_classic_closeness_of_aggregated_r(self, mag_r):
        scores = closeness_composite(aggregate_mag(mag_r, [1, 0]), mode='classic')
        np.testing.assert_allclose(scores.scores, [2 / 3, 0.5, 0])

    def test_bfs_distances(self, mag_r):
        state = bfs_sssp(to_digraph(mag_r), 0)
        assert state.dist == [0, -1, -1, 1, 2, -1]
        assert state.reachable() == [3, 4]

    def test_bruteforce_agrees_on_small_graph(self):
        g = CompositeDigraph.from_arcs(5, [0, 0, 1, 2, 3, 1], [1, 2, 3, 3, 4, 4])
        np.testing.assert_allclose(betweenness_bruteforce(g).scores, betweenness_composite(g).scores)

    def test_bruteforce_refuses_large_graphs(self):
        with pytest.raises(TooLargeError):
            betweenness_bruteforce(CompositeDigraph.from_arcs(20, [], []), max_n=14)


class TestSubDetermined:

    def test_betweenness_of_r_has_no_spurious_credit(self, mag_r):
        for distance in ('faithful', 'exact'):
            assert betweenness_subdet(mag_r, [1, 0], distance=distance).scores.tolist() == [0, 0, 0]

    @pytest.mark.parametrize('distance', ['faithful', 'exact'])
    def test_sub_bfs_distances_of_r(self, mag_r, distance):
        assert sub_bfs(mag_r, [1, 0], 1, distance=distance).dist == [0, 1, -1]
        assert sub_bfs(mag_r, [1, 0], 2, distance=distance).dist == [-1, 0, 1]

    def test_sub_bfs_accepts_class_vertex(self, mag_r):
        state = sub_bfs(mag_r, [1, 0], CompositeVertex((2,)))
        assert state.source == 1

    @pytest.mark.parametrize('source', [0, 4])
    def test_unknown_class(self, mag_r, source):
        with pytest.raises(UnknownClassError):
            sub_bfs(mag_r, [1, 0], source)

    def test_harmonic_closeness_of_r(self, mag_r):
        assert closeness_subdet(mag_r, [1, 0], mode='harmonic').scores.tolist() == [1, 1, 0]

    def test_no_time_travel(self, tvg4):
        state = sub_bfs(tvg4, '1,0', 1)
        assert state.dist[3] == -1
        assert state.dist[1] >= 1 and state.dist[2] >= 1

    def test_exact_counts_minimal_transitions(self):
        # (a|x) -> (a|y) stays in class a; (a|y) -> (b|y) is the only way to b
        mag = build_mag([('v', ['a', 'b', 'c']), ('t', ['x', 'y'])], [
            ('a', 'x', 'a', 'y'),
            ('a', 'y', 'b', 'y'),
            ('b', 'y', 'c', 'y'),
            ('a', 'x', 'c', 'x'),
        ])
        state = sub_bfs(mag, [1, 0], 1, distance='exact')
        assert state.dist == [0, 1, 1]
        assert betweenness_subdet(mag, [1, 0], distance='exact').scores.tolist() == [0, 0, 0]

    def test_exact_betweenness_credits_real_intermediate(self):
        mag = build_mag([('v', ['a', 'b', 'c']), ('t', ['x', 'y'])], [
            ('a', 'x', 'b', 'x'),
            ('b', 'x', 'b', 'y'),
            ('b', 'y', 'c', 'y'),
        ])
        for distance in ('faithful', 'exact'):
            assert betweenness_subdet(mag, [1, 0], distance=distance).scores.tolist() == [0, 1, 0]

    def test_exact_counts_only_realizable_sequences(self):
        mag = crossing_mag()
        np.testing.assert_allclose(
            betweenness_subdet(mag, [1, 0], distance='exact').scores, [0, 0.5, 1.5, 2, 0])
        state = sub_bfs(mag, [1, 0], 1, distance='exact')
        assert state.dist == [0, 1, 1, 2, 3]
        assert state.sigma == [1, 1, 1, 2, 1]
        assert state.preds[4] == [3]

    def test_faithful_merges_prefixes_across_members(self):
        # s -> a -> x -> c is counted although (x|1) has no arc to c
        mag = crossing_mag()
        assert betweenness_subdet(mag, [1, 0], distance='faithful').scores.tolist() == [0, 1, 1, 2, 0]
        assert sub_bfs(mag, [1, 0], 1, distance='faithful').sigma[4] == 2

    def test_class_paths(self):
        mag = crossing_mag()
        assert class_paths(mag, [1, 0], 1, 5, distance='exact') == [(0, 2, 3, 4)]
        assert class_paths(mag, [1, 0], 1, 4, distance='exact') == [(0, 1, 3), (0, 2, 3)]
        assert class_paths(mag, [1, 0], 1, 5, distance='faithful') == [(0, 1, 3, 4), (0, 2, 3, 4)]
        assert class_paths(mag, [1, 0], 5, 1, distance='exact') == []

    def test_revisited_class_is_credited_once_per_sequence(self):
        mag = revisiting_mag()
        assert class_paths(mag, [1, 0], 1, 4, distance='exact') == [(0, 1, 2, 1, 3)]
        expected = [0, 3, 1, 0]
        np.testing.assert_allclose(betweenness_subdet(mag, [1, 0], distance='exact').scores, expected)
        np.testing.assert_allclose(betweenness_subdet_bruteforce(mag, [1, 0]).scores, expected)

    def test_subdet_bruteforce_matches_exact_on_crossing_mag(self):
        mag = crossing_mag()
        np.testing.assert_allclose(betweenness_subdet_bruteforce(mag, [1, 0]).scores, [0, 0.5, 1.5, 2, 0])

    def test_subdet_bruteforce_refuses_large_graphs(self, mag_r):
        with pytest.raises(TooLargeError):
            betweenness_subdet_bruteforce(mag_r, [1, 0], max_n=4)

    def test_distance_modes_agree_on_reachability(self, mag_factory):
        for _, mag in mag_factory(20, seed=5, sizes_choices=[(4, 3), (3, 2, 2)]):
            for s in range(1, mag.aspects[0].size + 1):
                faithful = sub_bfs(mag, 1, s, distance='faithful').dist
                exact = sub_bfs(mag, 1, s, distance='exact').dist
                assert [d >= 0 for d in faithful] == [d >= 0 for d in exact]

    def test_scores_are_nonnegative(self, mag_factory):
        for _, mag in mag_factory(10, seed=9, sizes_choices=[(5, 3)]):
            for distance in ('faithful', 'exact'):
                assert (betweenness_subdet(mag, [1, 0], distance=distance).scores >= -1e-12).all()


class TestPathStatistics:

    def test_aggregate_counts_spurious_pair(self, mag_r):
        stats = path_statistics(aggregate_mag(mag_r, [1, 0]))
        assert stats == {'vertices': 3, 'reachable_pairs': 3,
                         'characteristic_path_length': pytest.approx(4 / 3), 'diameter': 2}

    def test_subdet_excludes_spurious_pair(self, mag_r):
        stats = path_statistics_subdet(mag_r, [1, 0])
        assert stats['reachable_pairs'] == 2
        assert stats['characteristic_path_length'] == 1.0
        assert stats['diameter'] == 1


class TestDispatch:

    def test_modes(self, mag_r):
        assert compute_centrality(mag_r, 'betweenness', 'composite').scores.tolist() == [0, 0, 1, 1, 0, 0]
        assert compute_centrality(mag_r, 'betweenness', 'naive-aggregate', '1,0').scores.tolist() == [0, 1, 0]
        assert compute_centrality(mag_r, 'betweenness', 'subdet', 1).scores.tolist() == [0, 0, 0]

    def test_pathstats_returns_dict(self, mag_r):
        assert compute_centrality(mag_r, 'pathstats', 'subdet', [1, 0])['diameter'] == 1

    def test_zeta_required(self, mag_r):
        with pytest.raises(MagError):
            compute_centrality(mag_r, 'closeness', 'subdet')

    def test_unknown_measure(self, mag_r):
        with pytest.raises(ValueError):
            compute_centrality(mag_r, 'eigenvector', 'composite')


def test_random_fixture_stream_is_reproducible():
    first = [mag for _, mag in random_mags(3, seed=1, sizes_choices=[(3, 3)])]
    second = [mag for _, mag in random_mags(3, seed=1, sizes_choices=[(3, 3)])]
    assert first == second
