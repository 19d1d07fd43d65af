"""
Sub-determination of MAGs.

A sub-determination ``zeta`` keeps a proper, non-empty sublist of the
aspects. Composite vertices that agree on the kept aspects fall in the same
class, which turns layer/time aggregation into a special case. Everything
here is vectorized over the composite codec with numpy; the sub-determination
matrix and aggregated adjacency are scipy CSR matrices.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from logging_config import setup_logging
from mag_core import (
    CompanionTuple,
    CompositeDigraph,
    CompositeVertex,
    MagError,
    MagGraph,
)

logger = setup_logging(__name__)


class SpecArityMismatchError(MagError):
    """Raised when a sub-determination has a different length than the aspect list."""
    pass


class ImproperSpecError(MagError):
    """Raised when a sub-determination keeps all aspects or none."""
    pass


class DimensionMismatchError(MagError):
    """Raised when matrix shapes are incompatible."""
    pass


class NotSquareError(MagError):
    """Raised when an operation needs a square matrix."""
    pass


@dataclass(frozen=True)
class SubDetSpec:
    """
    Indicator tuple ``zeta``: 1 keeps an aspect, 0 aggregates it away.

    The integer form maps aspect 1 to the least-significant bit, so
    ``zeta = 1`` on a 2-aspect MAG is ``(1, 0)``.
    """

    indicator: Tuple[int, ...]

    def __post_init__(self):
        indicator = tuple(int(z) for z in self.indicator)
        if any(z not in (0, 1) for z in indicator):
            raise ImproperSpecError(f"Sub-determination entries must be 0 or 1, got {indicator}")
        if 1 not in indicator or 0 not in indicator:
            raise ImproperSpecError(
                f"Sub-determination {indicator} must keep at least one aspect and drop at least one"
            )
        object.__setattr__(self, 'indicator', indicator)

    @classmethod
    def from_int(cls, zeta: int, p: int) -> 'SubDetSpec':
        """Decode ``1 <= zeta <= 2**p - 2``."""
        if not 1 <= zeta <= 2 ** p - 2:
            raise ImproperSpecError(f"Integer sub-determination {zeta} out of range [1, {2 ** p - 2}] for p={p}")
        return cls(tuple((zeta >> i) & 1 for i in range(p)))

    @classmethod
    def parse(cls, text: str) -> 'SubDetSpec':
        """Parse the CLI form ``"1,0,0"``."""
        try:
            return cls(tuple(int(tok) for tok in text.split(',')))
        except ValueError:
            raise ImproperSpecError(f"Cannot parse sub-determination '{text}', expected e.g. 1,0,0") from None

    @classmethod
    def coerce(cls, zeta: Union['SubDetSpec', int, str, Sequence[int]], p: int) -> 'SubDetSpec':
        """Accept a SubDetSpec, an integer, a ``"1,0"`` string or a 0/1 sequence."""
        if isinstance(zeta, SubDetSpec):
            spec = zeta
        elif isinstance(zeta, (int, np.integer)):
            spec = cls.from_int(int(zeta), p)
        elif isinstance(zeta, str):
            spec = cls.parse(zeta)
        else:
            spec = cls(tuple(zeta))
        if len(spec) != p:
            raise SpecArityMismatchError(
                f"Sub-determination {spec.indicator} has {len(spec)} entries, MAG has p={p} aspects"
            )
        return spec

    def __len__(self) -> int:
        return len(self.indicator)

    def __int__(self) -> int:
        return sum(z << i for i, z in enumerate(self.indicator))

    def __str__(self) -> str:
        return ','.join(str(z) for z in self.indicator)

    @property
    def kept(self) -> Tuple[int, ...]:
        """0-based positions of the kept aspects, in aspect order."""
        return tuple(i for i, z in enumerate(self.indicator) if z)


@dataclass(frozen=True)
class SubDetMatrix:
    """
    The ``n_zeta x n`` 0/1 matrix mapping each composite vertex to its class.

    Stored as ``col_to_row`` (0-based class of every composite vertex);
    :attr:`matrix` materializes the CSR form.
    """

    rows: int
    cols: int
    col_to_row: np.ndarray

    def __post_init__(self):
        self.col_to_row.setflags(write=False)

    @property
    def matrix(self) -> sparse.csr_matrix:
        data = np.ones(self.cols, dtype=np.float64)
        return sparse.csr_matrix(
            (data, (self.col_to_row, np.arange(self.cols))), shape=(self.rows, self.cols)
        )

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _check_arity(tau: CompanionTuple, zeta: SubDetSpec) -> None:
    if len(zeta) != tau.p:
        raise SpecArityMismatchError(
            f"Sub-determination {zeta.indicator} has {len(zeta)} entries, companion tuple has p={tau.p}"
        )


def sub_companion_tuple(tau: CompanionTuple, zeta: SubDetSpec) -> CompanionTuple:
    """Sizes of the kept aspects, in aspect order."""
    _check_arity(tau, zeta)
    return CompanionTuple(tuple(tau.sizes[i] for i in zeta.kept))


def sub_determine_vertex(v: CompositeVertex, zeta: SubDetSpec) -> CompositeVertex:
    """Project ``v`` onto the kept aspects."""
    if len(v) != len(zeta):
        raise SpecArityMismatchError(
            f"Vertex {v.elements} has {len(v)} elements, sub-determination has {len(zeta)}"
        )
    return CompositeVertex(tuple(v.elements[i] for i in zeta.kept))


def class_codes(tau: CompanionTuple, zeta: SubDetSpec, codes: np.ndarray = None) -> np.ndarray:
    """
    0-based class of each 0-based composite code (all of them by default).

    Decodes with the full companion tuple and re-encodes the kept digits with
    the sub-determined one; both use first-aspect-fastest order.
    """
    sub_tau = sub_companion_tuple(tau, zeta)
    if codes is None:
        codes = np.arange(tau.n, dtype=np.int64)
    digits = np.unravel_index(codes, tau.sizes, order='F')
    kept = tuple(digits[i] for i in zeta.kept)
    return np.ravel_multi_index(kept, sub_tau.sizes, order='F').astype(np.int64)


def build_subdet_matrix(tau: CompanionTuple, zeta: SubDetSpec) -> SubDetMatrix:
    """
    Construct ``M_zeta``: ``M[i, j] = 1`` iff composite ``j`` sub-determines to class ``i``.

    Parameters
    ----------
    tau : CompanionTuple
        Companion tuple of the MAG.
    zeta : SubDetSpec
        Proper sub-determination.

    Returns
    -------
    SubDetMatrix
        One nonzero per column; every row holds ``n / n_zeta`` ones.
    """
    sub_tau = sub_companion_tuple(tau, zeta)
    col_to_row = class_codes(tau, zeta)
    logger.debug(f"Sub-determination matrix {sub_tau.n}x{tau.n} for zeta={zeta}")
    return SubDetMatrix(rows=sub_tau.n, cols=tau.n, col_to_row=col_to_row)


def aggregate_adjacency(J, M: SubDetMatrix) -> sparse.csr_matrix:
    """
    ``J_zeta = M J M^T``: aggregated multigraph adjacency, self-loops included.

    Raises
    ------
    DimensionMismatchError
        If ``J`` is not ``n x n`` for the ``n`` columns of ``M``.
    """
    J = sparse.csr_matrix(J)
    if J.shape != (M.cols, M.cols):
        raise DimensionMismatchError(
            f"Adjacency is {J.shape[0]}x{J.shape[1]}, sub-determination matrix expects {M.cols}x{M.cols}"
        )
    Mm = M.matrix
    Jz = (Mm @ J @ Mm.T).tocsr()
    Jz.eliminate_zeros()
    return Jz


def simplify_adjacency(Jz) -> sparse.csr_matrix:
    """Zero the diagonal and set every remaining nonzero to 1."""
    Jz = sparse.csr_matrix(Jz, dtype=np.float64, copy=True)
    if Jz.shape[0] != Jz.shape[1]:
        raise NotSquareError(f"Matrix is {Jz.shape[0]}x{Jz.shape[1]}, expected square")
    Jz = (Jz - sparse.diags(Jz.diagonal())).tocsr()
    Jz.eliminate_zeros()
    Jz.data[:] = 1.0
    return Jz


def aggregate_mag(mag: MagGraph, zeta: Union[SubDetSpec, int, str, Sequence[int]]) -> CompositeDigraph:
    """
    Naive aggregation at edge level: arc ``(S(u), S(v))`` for every edge with ``S(u) != S(v)``.

    The resulting digraph carries the kept aspects, so it can be rendered or
    written back as a MAG of order ``p_zeta``.
    """
    zeta = SubDetSpec.coerce(zeta, mag.p)
    sub_tau = sub_companion_tuple(mag.tau, zeta)
    src = class_codes(mag.tau, zeta, mag.sources)
    dst = class_codes(mag.tau, zeta, mag.targets)
    keep = src != dst
    aspects = tuple(mag.aspects[i] for i in zeta.kept)
    g = CompositeDigraph.from_arcs(sub_tau.n, src[keep], dst[keep], aspects=aspects)
    logger.debug(f"Aggregated MAG to n_zeta={g.n} m_zeta={g.m} (zeta={zeta}, {int((~keep).sum())} loops dropped)")
    return g
