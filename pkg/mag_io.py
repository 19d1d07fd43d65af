"""
MAG text format and score files.

A MAG file is a header of ``%`` directives followed by one edge per line::

    # MAG R
    %mag 1
    %aspects 2
    %aspect vertex 3 1 2 3
    %aspect time 2 T1 T2
    %edges 5
    1 T1 1 T2
    2 T1 3 T1
    ...

``%aspect NAME SIZE [LABEL ...]`` declares one aspect; without labels the
elements are ``1..SIZE``. Edge tokens are labels, or 1-based element indices
when they are not labels. ``%reciprocal`` adds the reverse of every edge.
Blank lines and ``#`` comments are ignored. The parser streams the body, so
memory stays proportional to the edge count.

Score files are CSV with header ``vertex,score``; composite vertices are
written ``(a1|a2|...)`` and single-aspect vertices as the bare label.
"""

from pathlib import Path
from typing import IO, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from centrality import CentralityVector
from logging_config import setup_logging
from mag_core import Aspect, MagError, MagGraph, mag_from_codes

logger = setup_logging(__name__)

FORMAT_VERSION = 1
DIRECTIVES = ('%mag', '%aspects', '%aspect', '%edges', '%reciprocal')


class ParseError(MagError):
    """Raised for malformed MAG files; carries the 1-based line number."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)


def _resolve(aspect: Aspect, token: str, line_number: int) -> int:
    """1-based element index of ``token`` in ``aspect``."""
    as_index = int(token) if token.isdigit() and 1 <= int(token) <= aspect.size else None
    if aspect.has_label(token):
        index = aspect.index_of(token)
        if as_index is not None and as_index != index:
            raise ParseError(
                f"Token '{token}' is both label #{index} and index {as_index} of aspect '{aspect.name}'",
                line_number,
            )
        return index
    if as_index is not None:
        return as_index
    raise ParseError(f"Unknown element '{token}' for aspect '{aspect.name}'", line_number)


def parse_mag_file(stream: IO[str], dedup: bool = False) -> MagGraph:
    """
    Parse a MAG file.

    Parameters
    ----------
    stream : text stream
    dedup : bool
        Merge repeated edges instead of rejecting them.

    Returns
    -------
    MagGraph

    Raises
    ------
    ParseError
        With the offending line number for any malformed header, edge line,
        duplicate edge or count mismatch.
    """
    version = declared_p = declared_m = None
    reciprocal = False
    aspects: List[Aspect] = []
    strides: List[int] = []
    sources: List[int] = []
    targets: List[int] = []
    seen = set()
    body_lines = 0
    in_body = False
    line_number = 0

    for line_number, raw in enumerate(stream, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()

        if tokens[0].startswith('%'):
            if in_body:
                raise ParseError(f"Directive {tokens[0]} after the edge section started", line_number)
            directive = tokens[0]
            if directive not in DIRECTIVES:
                raise ParseError(f"Unknown directive {directive}", line_number)
            if directive != '%mag' and version is None:
                raise ParseError("File must start with '%mag 1'", line_number)
            try:
                if directive == '%mag':
                    version = int(tokens[1])
                    if version != FORMAT_VERSION:
                        raise ParseError(f"Unsupported format version {version}", line_number)
                elif directive == '%aspects':
                    declared_p = int(tokens[1])
                    if declared_p < 1:
                        raise ParseError("A MAG needs at least one aspect", line_number)
                elif directive == '%aspect':
                    name, size, labels = tokens[1], int(tokens[2]), tokens[3:]
                    if labels and len(labels) != size:
                        raise ParseError(
                            f"Aspect '{name}' declares {size} elements but lists {len(labels)} labels",
                            line_number,
                        )
                    if size < 1:
                        raise ParseError(f"Aspect '{name}' has no elements", line_number)
                    aspects.append(Aspect(name, tuple(labels) if labels else
                                          tuple(str(i) for i in range(1, size + 1))))
                elif directive == '%reciprocal':
                    reciprocal = True
                elif directive == '%edges':
                    declared_m = int(tokens[1])
                    if declared_p is None or len(aspects) != declared_p:
                        raise ParseError(
                            f"%aspects declares {declared_p} aspects but {len(aspects)} were given",
                            line_number,
                        )
                    acc = 1
                    for aspect in aspects:
                        strides.append(acc)
                        acc *= aspect.size
                    in_body = True
            except (IndexError, ValueError):
                raise ParseError(f"Malformed directive: {line}", line_number) from None
            except ParseError:
                raise
            except MagError as e:
                raise ParseError(str(e), line_number) from None
            continue

        if not in_body:
            raise ParseError("Edge line before the %edges directive", line_number)
        p = len(aspects)
        if len(tokens) != 2 * p:
            raise ParseError(f"Edge has {len(tokens)} tokens, expected 2p = {2 * p}", line_number)
        body_lines += 1
        u = sum((_resolve(a, t, line_number) - 1) * s for a, t, s in zip(aspects, tokens[:p], strides))
        v = sum((_resolve(a, t, line_number) - 1) * s for a, t, s in zip(aspects, tokens[p:], strides))
        if (u, v) in seen:
            if not dedup:
                raise ParseError(f"Duplicate edge {' '.join(tokens)}", line_number)
            continue
        seen.add((u, v))
        sources.append(u)
        targets.append(v)

    if version is None:
        raise ParseError("Empty file or missing '%mag 1' header", line_number or None)
    if not in_body:
        raise ParseError("Missing %edges directive", line_number)
    if body_lines != declared_m:
        raise ParseError(f"%edges declares {declared_m} edges but the body has {body_lines}", line_number)

    if reciprocal:
        for u, v in list(zip(sources, targets)):
            if u != v and (v, u) not in seen:
                seen.add((v, u))
                sources.append(v)
                targets.append(u)

    mag = mag_from_codes(aspects, np.asarray(sources, dtype=np.int64),
                         np.asarray(targets, dtype=np.int64), strict=True)
    logger.debug(f"Parsed MAG p={mag.p} n={mag.n} m={mag.m} reciprocal={reciprocal}")
    return mag


def load_mag(path: Union[str, Path], dedup: bool = False) -> MagGraph:
    """Parse the MAG file at ``path``."""
    with open(path, 'r', encoding='utf-8') as f:
        return parse_mag_file(f, dedup=dedup)


def write_mag_file(mag: MagGraph, sink: IO[str], comment: Optional[str] = None) -> None:
    """Write ``mag`` in the text format; ``parse_mag_file`` reads it back unchanged."""
    for aspect in mag.aspects:
        for label in (aspect.name,) + aspect.labels:
            if not label or any(ch.isspace() for ch in label) or '#' in label or label.startswith('%'):
                raise MagError(f"Label '{label}' of aspect '{aspect.name}' cannot be written to a MAG file")
    if comment:
        for line in comment.splitlines():
            sink.write(f"# {line}\n")
    sink.write(f"%mag {FORMAT_VERSION}\n")
    sink.write(f"%aspects {mag.p}\n")
    for aspect in mag.aspects:
        sink.write(f"%aspect {aspect.name} {aspect.size} {' '.join(aspect.labels)}\n")
    sink.write(f"%edges {mag.m}\n")
    for edge in mag.edges():
        sink.write(' '.join(edge) + '\n')


def scores_frame(scores: CentralityVector) -> pd.DataFrame:
    return pd.DataFrame({'vertex': scores.labels(), 'score': scores.scores})


def write_scores(scores: CentralityVector, sink: Union[IO[str], str, Path]) -> None:
    """CSV ``vertex,score`` in identifier order, 12 significant digits."""
    scores_frame(scores).to_csv(sink, index=False, float_format='%.12g')


def _parse_key(text: str) -> Tuple[str, ...]:
    if text.startswith('(') and text.endswith(')') and '|' in text:
        return tuple(text[1:-1].split('|'))
    return (text,)


def read_scores(source: Union[IO[str], str, Path]) -> CentralityVector:
    """Read a CSV written by :func:`write_scores`."""
    try:
        frame = pd.read_csv(source, dtype={'vertex': str}, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise ParseError("Score file is empty") from None
    missing = {'vertex', 'score'} - set(frame.columns)
    if missing:
        raise ParseError(f"Score file lacks column(s): {', '.join(sorted(missing))}")
    values = pd.to_numeric(frame['score'], errors='coerce')
    if values.isna().any():
        bad = int(values.isna().idxmax())
        raise ParseError(f"Non-numeric score '{frame['score'].iloc[bad]}'", bad + 2)
    keys = tuple(_parse_key(v) for v in frame['vertex'].tolist())
    return CentralityVector(keys, values.to_numpy(dtype=np.float64))
