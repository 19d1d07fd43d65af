import io

import numpy as np
import pytest

from centrality import CentralityVector, betweenness_composite
from generate import GenSpec, random_mag
from mag_core import to_digraph
from mag_io import ParseError, load_mag, parse_mag_file, read_scores, write_mag_file, write_scores

HEADER = "%mag 1\n%aspects 2\n%aspect vertex 3 1 2 3\n%aspect time 2 T1 T2\n"


def parse(text, **kwargs):
    return parse_mag_file(io.StringIO(text), **kwargs)


class TestParse:

    def test_fixture_r(self, mag_r):
        assert mag_r.n == 6 and mag_r.m == 5
        assert [a.name for a in mag_r.aspects] == ['vertex', 'time']

    def test_fixture_tvg4(self, tvg4):
        assert tvg4.tau.sizes == (4, 3)
        assert tvg4.m == 14

    def test_default_labels(self):
        mag = parse("%mag 1\n%aspects 2\n%aspect v 2\n%aspect t 2\n%edges 1\n1 1 2 2\n")
        assert mag.aspects[0].labels == ('1', '2')
        assert mag.edge_set() == {(0, 3)}

    def test_index_tokens(self):
        mag = parse(HEADER + "%edges 1\n1 1 2 2\n")
        assert set(mag.edges()) == {('1', 'T1', '2', 'T2')}

    def test_comments_and_blank_lines(self):
        mag = parse("# c\n" + HEADER + "\n%edges 1\n\n1 T1 1 T2  # trailing\n")
        assert mag.m == 1

    def test_reciprocal(self):
        mag = parse(HEADER + "%reciprocal\n%edges 1\n1 T1 2 T1\n")
        assert mag.edge_set() == {(0, 1), (1, 0)}

    @pytest.mark.parametrize('text,line', [
        (HEADER + "%edges 1\n1 T1 2\n", 6),
        (HEADER + "%edges 1\n1 T9 2 T1\n", 6),
        (HEADER + "%edges 2\n1 T1 2 T1\n1 T1 2 T1\n", 7),
        (HEADER + "%edges 2\n1 T1 2 T1\n", 6),
        ("%mag 2\n", 1),
        ("%aspects 2\n", 1),
        ("%mag 1\n%aspects 1\n%aspect v 2 a\n", 3),
        ("%mag 1\n%aspects 2\n%aspect v 2\n%edges 0\n", 4),
        (HEADER + "1 T1 2 T1\n", 5),
        (HEADER + "%edges 1\n1 T1 2 T1\n%reciprocal\n", 7),
        ("%mag 1\n%bogus\n", 2),
    ])
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(ParseError) as excinfo:
            parse(text)
        assert excinfo.value.line_number == line
        assert f"line {line}" in str(excinfo.value)

    def test_empty_file(self):
        with pytest.raises(ParseError):
            parse("")

    def test_dedup(self):
        mag = parse(HEADER + "%edges 2\n1 T1 2 T1\n1 T1 2 T1\n", dedup=True)
        assert mag.m == 1

    def test_ambiguous_numeric_label(self):
        text = "%mag 1\n%aspects 2\n%aspect v 2 2 1\n%aspect t 1\n%edges 1\n1 1 2 1\n"
        with pytest.raises(ParseError):
            parse(text)


class TestWrite:

    def test_round_trip(self, tvg4):
        sink = io.StringIO()
        write_mag_file(tvg4, sink, comment="tvg4")
        assert parse(sink.getvalue()) == tvg4

    def test_round_trip_random(self):
        mag = random_mag(GenSpec((7, 3, 2), 80, seed=12))
        sink = io.StringIO()
        write_mag_file(mag, sink)
        assert parse(sink.getvalue()) == mag

    def test_load_from_path(self, tmp_path, mag_r):
        path = tmp_path / 'r.mag'
        with open(path, 'w', encoding='utf-8') as f:
            write_mag_file(mag_r, f)
        assert load_mag(path) == mag_r


class TestScores:

    def test_round_trip(self, mag_r):
        scores = betweenness_composite(to_digraph(mag_r))
        sink = io.StringIO()
        write_scores(scores, sink)
        text = sink.getvalue()
        assert text.splitlines()[0] == 'vertex,score'
        assert '(1|T2),1' in text
        back = read_scores(io.StringIO(text))
        assert back.keys == scores.keys
        np.testing.assert_allclose(back.scores, scores.scores)

    def test_single_aspect_labels(self):
        scores = CentralityVector((('1',), ('2',)), np.array([0.25, 1.0]))
        sink = io.StringIO()
        write_scores(scores, sink)
        assert sink.getvalue().splitlines()[1:] == ['1,0.25', '2,1']

    def test_missing_column(self):
        with pytest.raises(ParseError):
            read_scores(io.StringIO("vertex,value\n1,2\n"))

    def test_non_numeric_score(self):
        with pytest.raises(ParseError) as excinfo:
            read_scores(io.StringIO("vertex,score\n1,0.5\n2,abc\n"))
        assert excinfo.value.line_number == 3
