"""
MultiAspect Graph (MAG) data model.

A MAG ``H = (A, E)`` is an ordered list of aspects plus a set of directed
edges, each edge pairing one element of every aspect on its source side and
one on its target side. Composite vertices (one element per aspect) are
encoded as integers with a mixed-radix codec in which the FIRST aspect varies
fastest::

    D((a1, ..., ap)) = 1 + sum_i (a_i - 1) * prod_{k<i} tau_k

Indices are 1-based at the API boundary (files, CLI, ``encode_composite``)
and 0-based inside arrays and adjacency lists.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from logging_config import setup_logging

logger = setup_logging(__name__)

Label = Union[str, int]


# ========================================
# Errors
# ========================================

class MagError(Exception):
    """Base class for data errors raised while building or querying a MAG."""
    pass


class EmptyAspectError(MagError):
    """Raised when the aspect list is empty or an aspect has no elements."""
    pass


class ArityMismatchError(MagError):
    """Raised when an edge tuple does not have exactly 2p entries."""
    pass


class UnknownLabelError(MagError):
    """Raised when an edge references an element absent from its aspect."""
    pass


class DuplicateEdgeError(MagError):
    """Raised when the same edge appears twice and deduplication is off."""
    pass


class OutOfRangeError(MagError):
    """Raised for composite indices, element indices or aspect positions out of range."""
    pass


# ========================================
# Domain types
# ========================================

@dataclass(frozen=True)
class Aspect:
    """One dimension of a MAG: a name and its ordered element labels."""

    name: str
    labels: Tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        if not labels:
            raise EmptyAspectError(f"Aspect '{self.name}' has no elements")
        index = {}
        for position, label in enumerate(labels, start=1):
            if label in index:
                raise MagError(f"Aspect '{self.name}' repeats label '{label}'")
            index[label] = position
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, '_index', index)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label: Label) -> int:
        """1-based position of ``label``; raises UnknownLabelError."""
        try:
            return self._index[str(label)]
        except KeyError:
            raise UnknownLabelError(
                f"Unknown label '{label}' for aspect '{self.name}' "
                f"(valid: {', '.join(self.labels[:8])}{', ...' if self.size > 8 else ''})"
            ) from None

    def has_label(self, label: Label) -> bool:
        return str(label) in self._index

    def label_of(self, index: int) -> str:
        if not 1 <= index <= self.size:
            raise OutOfRangeError(
                f"Element index {index} out of range [1, {self.size}] for aspect '{self.name}'"
            )
        return self.labels[index - 1]


@dataclass(frozen=True)
class CompanionTuple:
    """Per-aspect cardinalities ``(tau_1, ..., tau_p)``."""

    sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise EmptyAspectError("Companion tuple needs at least one aspect")
        if any(s < 1 for s in sizes):
            raise EmptyAspectError(f"Aspect sizes must be positive, got {sizes}")
        object.__setattr__(self, 'sizes', sizes)

    @property
    def p(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return int(np.prod(self.sizes, dtype=np.int64))

    @property
    def strides(self) -> Tuple[int, ...]:
        """Place value of each aspect digit; the first aspect has stride 1."""
        strides, acc = [], 1
        for size in self.sizes:
            strides.append(acc)
            acc *= size
        return tuple(strides)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class CompositeVertex:
    """One element index per aspect, 1-based."""

    elements: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'elements', tuple(int(a) for a in self.elements))

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class CompositeDigraph:
    """
    Directed graph on composite vertices (the isomorphic digraph of a MAG).

    Vertices are 0-based internally; ``out_adj[v]`` is the sorted,
    duplicate-free tuple of successors of ``v`` and ``in_adj`` mirrors it.
    ``aspects`` is kept when the digraph comes from a MAG, so vertex labels
    can be rendered.
    """

    n: int
    out_adj: Tuple[Tuple[int, ...], ...]
    in_adj: Tuple[Tuple[int, ...], ...]
    aspects: Optional[Tuple[Aspect, ...]] = None

    @classmethod
    def from_arcs(cls, n: int, sources: Iterable[int], targets: Iterable[int],
                  aspects: Optional[Sequence[Aspect]] = None) -> 'CompositeDigraph':
        """
        Build from parallel 0-based arc arrays; duplicates are merged.

        Raises
        ------
        OutOfRangeError
            If an endpoint lies outside ``[0, n)``.
        """
        src = np.asarray(list(sources) if not isinstance(sources, np.ndarray) else sources, dtype=np.int64)
        dst = np.asarray(list(targets) if not isinstance(targets, np.ndarray) else targets, dtype=np.int64)
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise OutOfRangeError(f"Arc endpoint out of range [0, {n})")
        if src.size:
            pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
            src, dst = pairs[:, 0], pairs[:, 1]
        out_lists = [[] for _ in range(n)]
        in_lists = [[] for _ in range(n)]
        for u, v in zip(src.tolist(), dst.tolist()):
            out_lists[u].append(v)
            in_lists[v].append(u)
        return cls(
            n=n,
            out_adj=tuple(tuple(adj) for adj in out_lists),
            in_adj=tuple(tuple(sorted(adj)) for adj in in_lists),
            aspects=tuple(aspects) if aspects is not None else None,
        )

    @property
    def m(self) -> int:
        return sum(len(adj) for adj in self.out_adj)

    def arcs(self) -> list:
        """All arcs as 1-based ``(u, v)`` pairs in codec order."""
        return [(u + 1, v + 1) for u, adj in enumerate(self.out_adj) for v in adj]

    def arc_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """0-based ``(sources, targets)`` arrays."""
        src = np.fromiter((u for u, adj in enumerate(self.out_adj) for _ in adj), dtype=np.int64)
        dst = np.fromiter((v for adj in self.out_adj for v in adj), dtype=np.int64)
        return src, dst

    def vertex_key(self, v: int) -> Tuple[str, ...]:
        """Label tuple of 0-based vertex ``v``; plain 1-based index without aspects."""
        if self.aspects is None:
            return (str(v + 1),)
        tau = CompanionTuple(tuple(a.size for a in self.aspects))
        elements = decode_composite(v + 1, tau).elements
        return tuple(a.label_of(e) for a, e in zip(self.aspects, elements))

    def vertex_keys(self) -> Tuple[Tuple[str, ...], ...]:
        if self.aspects is None:
            return tuple((str(v + 1),) for v in range(self.n))
        return composite_keys(self.aspects)


def composite_keys(aspects: Sequence[Aspect]) -> Tuple[Tuple[str, ...], ...]:
    """Label tuple of every composite vertex over ``aspects``, in codec order."""
    sizes = tuple(a.size for a in aspects)
    n = int(np.prod(sizes, dtype=np.int64))
    digits = np.unravel_index(np.arange(n), sizes, order='F')
    columns = [[a.labels[d] for d in digit.tolist()] for a, digit in zip(aspects, digits)]
    return tuple(zip(*columns))


@dataclass(frozen=True)
class MagGraph:
    """
    An immutable MAG ``H = (A, E)``.

    Edges are stored as sorted parallel arrays of 0-based composite codes
    (``sources[k] -> targets[k]``), which is the arc list of the isomorphic
    digraph. Use :meth:`edges` for the 2p-tuple label form.
    """

    aspects: Tuple[Aspect, ...]
    sources: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        for arr in (self.sources, self.targets):
            arr.setflags(write=False)

    @property
    def p(self) -> int:
        return len(self.aspects)

    @property
    def tau(self) -> CompanionTuple:
        return CompanionTuple(tuple(a.size for a in self.aspects))

    @property
    def n(self) -> int:
        return self.tau.n

    @property
    def m(self) -> int:
        return int(self.sources.size)

    def edges(self) -> Iterator[Tuple[str, ...]]:
        """Yield every edge as a 2p-tuple of labels, in codec order."""
        tau = self.tau
        src_digits = np.unravel_index(self.sources, tau.sizes, order='F')
        dst_digits = np.unravel_index(self.targets, tau.sizes, order='F')
        for k in range(self.m):
            yield tuple(a.labels[d[k]] for a, d in zip(self.aspects, src_digits)) + \
                tuple(a.labels[d[k]] for a, d in zip(self.aspects, dst_digits))

    def edge_set(self) -> frozenset:
        """Edges as 0-based ``(u, v)`` code pairs."""
        return frozenset(zip(self.sources.tolist(), self.targets.tolist()))

    def vertex(self, labels: Sequence[Label]) -> CompositeVertex:
        """Composite vertex for a tuple of labels, one per aspect."""
        if len(labels) != self.p:
            raise ArityMismatchError(f"Expected {self.p} labels, got {len(labels)}")
        return CompositeVertex(tuple(a.index_of(l) for a, l in zip(self.aspects, labels)))

    def project(self, v: CompositeVertex, i: int) -> str:
        """Label of aspect ``i`` (1-based) of ``v``."""
        return self.aspects[_check_position(i, self.p) - 1].label_of(project_aspect(v, i))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MagGraph):
            return NotImplemented
        return (self.aspects == other.aspects
                and np.array_equal(self.sources, other.sources)
                and np.array_equal(self.targets, other.targets))

    def __hash__(self) -> int:
        return hash((self.aspects, self.sources.tobytes(), self.targets.tobytes()))


# ========================================
# Operations
# ========================================

def _coerce_aspect(position: int, spec) -> Aspect:
    if isinstance(spec, Aspect):
        return spec
    if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[0], str) \
            and not isinstance(spec[1], str):
        name, labels = spec
        return Aspect(name, tuple(labels))
    return Aspect(f"aspect{position}", tuple(spec))


def build_mag(aspects: Sequence, edges: Iterable[Sequence[Label]], strict: bool = True) -> MagGraph:
    """
    Validate aspects and edges and build a MagGraph.

    Parameters
    ----------
    aspects : sequence
        One entry per aspect: an :class:`Aspect`, a ``(name, labels)`` pair
        or a bare list of labels (named ``aspect1``, ``aspect2``, ...).
    edges : iterable of sequences
        Each edge is a 2p-tuple of labels ``(a1..ap, b1..bp)``.
    strict : bool
        When true a repeated edge raises DuplicateEdgeError; otherwise
        repeats are merged.

    Returns
    -------
    MagGraph

    Raises
    ------
    EmptyAspectError, ArityMismatchError, UnknownLabelError, DuplicateEdgeError
    """
    if not aspects:
        raise EmptyAspectError("A MAG needs at least one aspect")
    aspect_list = tuple(_coerce_aspect(i, spec) for i, spec in enumerate(aspects, start=1))
    p = len(aspect_list)
    tau = CompanionTuple(tuple(a.size for a in aspect_list))
    strides = tau.strides

    codes_src, codes_dst = [], []
    for number, edge in enumerate(edges, start=1):
        edge = tuple(edge)
        if len(edge) != 2 * p:
            raise ArityMismatchError(
                f"Edge {number} has {len(edge)} entries, expected 2p = {2 * p}: {edge}"
            )
        u = sum((a.index_of(l) - 1) * s for a, l, s in zip(aspect_list, edge[:p], strides))
        v = sum((a.index_of(l) - 1) * s for a, l, s in zip(aspect_list, edge[p:], strides))
        codes_src.append(u)
        codes_dst.append(v)

    return _from_codes(aspect_list, np.asarray(codes_src, dtype=np.int64),
                       np.asarray(codes_dst, dtype=np.int64), strict=strict)


def _from_codes(aspects: Tuple[Aspect, ...], sources: np.ndarray, targets: np.ndarray,
                strict: bool = True) -> MagGraph:
    """Sort, check duplicates and freeze 0-based edge codes."""
    if sources.size:
        pairs = np.stack([sources, targets], axis=1)
        unique, counts = np.unique(pairs, axis=0, return_counts=True)
        if strict and (counts > 1).any():
            u, v = unique[np.argmax(counts > 1)]
            tau = CompanionTuple(tuple(a.size for a in aspects))
            raise DuplicateEdgeError(
                f"Duplicate edge {decode_composite(int(u) + 1, tau).elements} -> "
                f"{decode_composite(int(v) + 1, tau).elements}"
            )
        sources, targets = unique[:, 0].copy(), unique[:, 1].copy()
    else:
        sources, targets = np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    mag = MagGraph(aspects=aspects, sources=sources, targets=targets)
    logger.debug(f"Built MAG p={mag.p} tau={mag.tau.sizes} n={mag.n} m={mag.m}")
    return mag


def mag_from_codes(aspects: Sequence[Aspect], sources, targets, strict: bool = True) -> MagGraph:
    """Build a MagGraph directly from 0-based composite codes."""
    aspects = tuple(aspects)
    n = CompanionTuple(tuple(a.size for a in aspects)).n
    src = np.asarray(sources, dtype=np.int64)
    dst = np.asarray(targets, dtype=np.int64)
    if src.shape != dst.shape:
        raise ArityMismatchError("Source and target code arrays differ in length")
    if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
        raise OutOfRangeError(f"Composite code out of range [0, {n})")
    return _from_codes(aspects, src, dst, strict=strict)


def encode_composite(v: CompositeVertex, tau: CompanionTuple) -> int:
    """
    1-based codec index of ``v``; the first aspect is the least significant digit.

    Raises
    ------
    OutOfRangeError
        If ``v`` has the wrong arity or an element outside ``[1, tau_i]``.
    """
    if len(v) != tau.p:
        raise OutOfRangeError(f"Vertex {v.elements} has {len(v)} elements, expected {tau.p}")
    index = 1
    for a, size, stride in zip(v.elements, tau.sizes, tau.strides):
        if not 1 <= a <= size:
            raise OutOfRangeError(f"Element {a} out of range [1, {size}] in vertex {v.elements}")
        index += (a - 1) * stride
    return index


def decode_composite(index: int, tau: CompanionTuple) -> CompositeVertex:
    """Inverse of :func:`encode_composite`."""
    n = tau.n
    if not 1 <= index <= n:
        raise OutOfRangeError(f"Composite index {index} out of range [1, {n}]")
    rest, elements = index - 1, []
    for size in tau.sizes:
        rest, digit = divmod(rest, size)
        elements.append(digit + 1)
    return CompositeVertex(tuple(elements))


def project_aspect(v: CompositeVertex, i: int) -> int:
    """Element ``a_i`` of ``v`` (aspect position ``i`` is 1-based)."""
    return v.elements[_check_position(i, len(v)) - 1]


def _check_position(i: int, p: int) -> int:
    if not 1 <= i <= p:
        raise OutOfRangeError(f"Aspect position {i} out of range [1, {p}]")
    return i


def to_digraph(mag: MagGraph) -> CompositeDigraph:
    """Isomorphic digraph of ``mag``: arc ``(D(u), D(v))`` for each edge ``(u, v)``."""
    return CompositeDigraph.from_arcs(mag.n, mag.sources, mag.targets, aspects=mag.aspects)


def digraph_to_mag(g: CompositeDigraph) -> MagGraph:
    """MagGraph view of a digraph that carries its aspects (e.g. an aggregate)."""
    aspects = g.aspects if g.aspects is not None else \
        (Aspect('vertex', tuple(str(i) for i in range(1, g.n + 1))),)
    src, dst = g.arc_arrays()
    return mag_from_codes(aspects, src, dst)


def mag_summary(mag: MagGraph) -> dict:
    """Shape statistics used by ``mag info`` and experiment logs."""
    self_loops = int(np.count_nonzero(mag.sources == mag.targets))
    return {
        'p': mag.p,
        'aspects': [f"{a.name}({a.size})" for a in mag.aspects],
        'n': mag.n,
        'm': mag.m,
        'self_loops': self_loops,
        'density': mag.m / (mag.n * (mag.n - 1)) if mag.n > 1 else 0.0,
    }
