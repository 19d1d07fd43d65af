from itertools import product

import numpy as np
import pytest
from scipy import sparse

from mag_core import CompanionTuple, CompositeVertex
from matrix_oracle import adjacency_matrix
from mag_core import to_digraph
from subdet import (
    DimensionMismatchError,
    ImproperSpecError,
    NotSquareError,
    SpecArityMismatchError,
    SubDetSpec,
    aggregate_adjacency,
    aggregate_mag,
    build_subdet_matrix,
    class_codes,
    simplify_adjacency,
    sub_companion_tuple,
    sub_determine_vertex,
)

M_R = np.array([
    [1, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1],
])

J_R = np.array([
    [0, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0],
])

AGGREGATED_R = np.array([
    [1, 1, 0],
    [0, 1, 1],
    [0, 0, 1],
])

SIMPLIFIED_R = np.array([
    [0, 1, 0],
    [0, 0, 1],
    [0, 0, 0],
])


class TestSubDetSpec:

    def test_integer_form_uses_aspect_one_as_low_bit(self):
        assert SubDetSpec.from_int(1, 2).indicator == (1, 0)
        assert SubDetSpec.from_int(2, 2).indicator == (0, 1)
        assert SubDetSpec.from_int(5, 3).indicator == (1, 0, 1)
        assert int(SubDetSpec((0, 1, 1))) == 6

    def test_parse_and_str(self):
        spec = SubDetSpec.parse('1,0,0')
        assert spec.kept == (0,)
        assert str(spec) == '1,0,0'

    @pytest.mark.parametrize('indicator', [(1, 1), (0, 0), (1, 2)])
    def test_improper(self, indicator):
        with pytest.raises(ImproperSpecError):
            SubDetSpec(indicator)

    @pytest.mark.parametrize('zeta', [0, 3])
    def test_improper_integer(self, zeta):
        with pytest.raises(ImproperSpecError):
            SubDetSpec.from_int(zeta, 2)

    def test_coerce_checks_arity(self):
        with pytest.raises(SpecArityMismatchError):
            SubDetSpec.coerce('1,0,0', 2)

    def test_coerce_accepts_every_form(self):
        expected = SubDetSpec((0, 1))
        for form in (expected, 2, '0,1', [0, 1], np.int64(2)):
            assert SubDetSpec.coerce(form, 2) == expected


class TestProjection:

    def test_sub_companion_tuple(self):
        tau = CompanionTuple((1000, 2, 5))
        assert sub_companion_tuple(tau, SubDetSpec((1, 0, 0))).sizes == (1000,)
        assert sub_companion_tuple(tau, SubDetSpec((0, 1, 1))).n == 10

    def test_sub_determine_vertex(self):
        v = CompositeVertex((7, 2, 4))
        assert sub_determine_vertex(v, SubDetSpec((1, 0, 1))).elements == (7, 4)

    def test_class_codes_keep_codec_order(self):
        tau = CompanionTuple((2, 3, 2))
        codes = class_codes(tau, SubDetSpec((1, 0, 1)))
        # composite (a1, a2, a3) -> class (a1, a3) under first-fastest order
        assert codes.tolist() == [0, 1, 0, 1, 0, 1, 2, 3, 2, 3, 2, 3]


class TestMatrices:

    def test_subdet_matrix_of_r(self, mag_r):
        M = build_subdet_matrix(mag_r.tau, SubDetSpec((1, 0)))
        assert np.array_equal(M.toarray(), M_R)

    def test_subdet_matrix_rows_and_columns(self):
        tau = CompanionTuple((4, 3, 2))
        M = build_subdet_matrix(tau, SubDetSpec((0, 1, 1))).toarray()
        assert M.shape == (6, 24)
        assert (M.sum(axis=0) == 1).all()
        assert (M.sum(axis=1) == 4).all()

    def test_adjacency_of_r(self, mag_r):
        J = adjacency_matrix(to_digraph(mag_r))
        assert np.array_equal(J.toarray(), J_R)

    def test_aggregated_adjacency_of_r(self, mag_r):
        M = build_subdet_matrix(mag_r.tau, SubDetSpec((1, 0)))
        Jz = aggregate_adjacency(sparse.csr_matrix(J_R), M)
        assert np.array_equal(Jz.toarray(), AGGREGATED_R)

    def test_simplified_adjacency_of_r(self):
        assert np.array_equal(simplify_adjacency(AGGREGATED_R).toarray(), SIMPLIFIED_R)

    def test_simplify_binarizes_multi_edges(self):
        S = simplify_adjacency(np.array([[2, 3], [0, 5]]))
        assert np.array_equal(S.toarray(), [[0, 1], [0, 0]])

    def test_simplify_rejects_non_square(self):
        with pytest.raises(NotSquareError):
            simplify_adjacency(np.zeros((2, 3)))

    def test_aggregate_dimension_mismatch(self, mag_r):
        M = build_subdet_matrix(mag_r.tau, SubDetSpec((1, 0)))
        with pytest.raises(DimensionMismatchError):
            aggregate_adjacency(np.eye(4), M)

    def test_aggregate_mag_matches_simplified_matrix(self, mag_r):
        g = aggregate_mag(mag_r, [1, 0])
        assert np.array_equal(adjacency_matrix(g).toarray(), SIMPLIFIED_R)
        assert [a.name for a in g.aspects] == ['vertex']

    def test_aggregate_mag_over_time(self, mag_r):
        g = aggregate_mag(mag_r, '0,1')
        # only 1 T1 -> 1 T2, 2 T1 -> 2 T2 and 3 T1 -> 3 T2 cross time classes
        assert g.arcs() == [(1, 2)]

    @pytest.mark.parametrize('sizes, indicator', [((3, 2), (1, 0)), ((4, 3, 2), (0, 1, 1)), ((2, 2, 3), (1, 0, 1))])
    def test_aggregation_does_not_commute_back(self, sizes, indicator):
        M = build_subdet_matrix(CompanionTuple(sizes), SubDetSpec(indicator)).toarray()
        n_zeta, n = M.shape
        assert np.linalg.matrix_rank(M.T @ M) <= n_zeta < n
        assert not np.array_equal(M.T @ M, np.eye(n))

    def test_matrix_and_edge_aggregation_agree(self, mag_factory):
        sizes_choices = [(10, 5), (20, 10), (8, 5, 5), (4, 6, 8), (3, 3, 3)]
        checked = 0
        for sizes, mag in mag_factory(15, seed=31, sizes_choices=sizes_choices, density=(0.005, 0.05)):
            J = adjacency_matrix(to_digraph(mag))
            for bits in product((0, 1), repeat=len(sizes)):
                if not 0 < sum(bits) < len(sizes):
                    continue
                zeta = SubDetSpec(bits)
                expected = adjacency_matrix(aggregate_mag(mag, zeta)).toarray() != 0
                got = simplify_adjacency(aggregate_adjacency(J, build_subdet_matrix(mag.tau, zeta))).toarray() != 0
                assert np.array_equal(got, expected)
                checked += 1
        assert checked >= 15

    def test_aggregated_entries_count_edges_between_classes(self, mag_factory):
        for sizes, mag in mag_factory(10, seed=32, sizes_choices=[(4, 3), (2, 2, 3), (6, 2)]):
            J = adjacency_matrix(to_digraph(mag))
            for bits in product((0, 1), repeat=len(sizes)):
                if not 0 < sum(bits) < len(sizes):
                    continue
                zeta = SubDetSpec(bits)
                n_zeta = sub_companion_tuple(mag.tau, zeta).n
                counts = np.zeros((n_zeta, n_zeta))
                np.add.at(counts, (class_codes(mag.tau, zeta, mag.sources),
                                   class_codes(mag.tau, zeta, mag.targets)), 1)
                Jz = aggregate_adjacency(J, build_subdet_matrix(mag.tau, zeta)).toarray()
                assert np.array_equal(Jz, counts)
                assert Jz.sum() == mag.m

