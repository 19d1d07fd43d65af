"""
Algebraic reachability oracle.

Reachability is the pattern of the walk series ``B = sum_k Jr^k`` of a
scaled adjacency matrix ``Jr``. Sub-determining before the series (aggregate
first, then close) admits spurious paths; sub-determining after it
(``M B M^T``) does not. Both constructions are provided so the graph
traversals in :mod:`centrality` can be checked against them.

Two arithmetics are available:

* ``boolean`` (default): OR-AND products on 0/1 patterns. Exact.
* ``real``: the scaled series in floating point, with entries at or below
  ``Config.ORACLE_THRESHOLD`` treated as zero. Long walks underflow the
  threshold on larger graphs, which is why the boolean form is the default.
"""

from typing import List, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import csgraph

from config import Config
from logging_config import setup_logging
from mag_core import CompositeDigraph, MagError, MagGraph, to_digraph
from subdet import (
    DimensionMismatchError,
    NotSquareError,
    SubDetMatrix,
    SubDetSpec,
    aggregate_adjacency,
    build_subdet_matrix,
)

logger = setup_logging(__name__)

SEMIRINGS = ('boolean', 'real')
METHODS = ('series', 'inverse')

# Term magnitude beyond which the real series is declared divergent
DIVERGENCE_BOUND = 1e150


class DivergenceError(MagError):
    """Raised when the walk series cannot converge (spectral radius >= 1)."""
    pass


def _square(J, what: str = 'Matrix') -> sparse.csr_matrix:
    J = sparse.csr_matrix(J, dtype=np.float64)
    if J.shape[0] != J.shape[1]:
        raise NotSquareError(f"{what} is {J.shape[0]}x{J.shape[1]}, expected square")
    return J


def adjacency_matrix(g: CompositeDigraph) -> sparse.csr_matrix:
    """0/1 adjacency matrix of ``g``."""
    src, dst = g.arc_arrays()
    data = np.ones(src.size, dtype=np.float64)
    return sparse.csr_matrix((data, (src, dst)), shape=(g.n, g.n))


def is_nilpotent(J) -> bool:
    """True when the nonzero pattern of ``J`` is acyclic (no loops, singleton SCCs)."""
    J = _square(J)
    if np.any(J.diagonal() != 0):
        return False
    n_components, _ = csgraph.connected_components(J, directed=True, connection='strong')
    return n_components == J.shape[0]


def spectral_radius_estimate(J, max_iters: int = None, tol: float = None) -> float:
    """
    Estimate the spectral radius of a nonnegative square matrix.

    Acyclic patterns are nilpotent and return 0 without iterating. Otherwise
    power iteration runs on ``J + I`` from the all-ones vector, tracking the
    Collatz-Wielandt bounds ``min_i (Ax)_i / x_i <= rho(A) <= max_i (Ax)_i / x_i``.
    The upper bound minus one is returned, so the estimate never falls below
    the true radius.

    Parameters
    ----------
    J : sparse or dense matrix
        Nonnegative square matrix.
    max_iters : int, optional
        Iteration cap (default ``Config.ORACLE_MAX_ITERS``).
    tol : float, optional
        Relative tolerance on the bound gap (default ``Config.ORACLE_TOL``).

    Returns
    -------
    float

    Raises
    ------
    NotSquareError
    """
    max_iters = max_iters or Config.ORACLE_MAX_ITERS
    tol = tol or Config.ORACLE_TOL
    J = _square(J)
    n = J.shape[0]
    if n == 0 or J.nnz == 0 or is_nilpotent(J):
        return 0.0

    A = (J + sparse.identity(n, format='csr')).tocsr()
    x = np.ones(n)
    best = previous = np.inf
    for iteration in range(1, max_iters + 1):
        y = A @ x
        ratios = y / x
        lower, upper = ratios.min(), ratios.max()
        best = min(best, upper)
        scale = max(upper, 1.0)
        if upper - lower <= tol * scale or abs(previous - upper) <= tol * scale * 1e-3:
            break
        previous = upper
        x = y / np.linalg.norm(y, np.inf)
        # every bound so far is valid; stop before entries underflow
        if x.min() <= np.finfo(np.float64).tiny:
            logger.debug(f"Power iteration stopped at {iteration}: iterate underflow")
            break
    else:
        logger.debug(f"Power iteration hit max_iters={max_iters}; returning upper bound")
    estimate = max(best - 1.0, 0.0)
    logger.debug(f"Spectral radius estimate {estimate:.6g} after {iteration} iterations (n={n})")
    return float(estimate)


def persistence_factor(J, tol: float = None) -> float:
    """``rho_H = 1 / (1 + rho_hat * (1 + tol))``, strictly below ``1 / rho(J)``."""
    tol = tol or Config.ORACLE_TOL
    rho_hat = spectral_radius_estimate(J, tol=tol)
    return 1.0 / (1.0 + rho_hat * (1.0 + tol))


def scale_adjacency(J, tol: float = None) -> sparse.csr_matrix:
    """Return ``rho_H * J`` so that the walk series converges."""
    J = _square(J)
    return (persistence_factor(J, tol=tol) * J).tocsr()


def _pattern(J) -> sparse.csr_matrix:
    P = sparse.csr_matrix(J, copy=True)
    P.eliminate_zeros()
    P.data = np.ones_like(P.data, dtype=np.int32)
    return P.astype(np.int32)


def _binarize(A: sparse.csr_matrix) -> sparse.csr_matrix:
    A = A.tocsr()
    A.eliminate_zeros()
    A.data = np.ones_like(A.data)
    return A


def _boolean_closure(P: sparse.csr_matrix) -> sparse.csr_matrix:
    """Iterate ``B <- I or (P B)`` until the pattern stops growing (at most n rounds)."""
    n = P.shape[0]
    identity = sparse.identity(n, dtype=np.int32, format='csr')
    B = identity.copy()
    for step in range(n):
        grown = _binarize(identity + _binarize(P @ B))
        if grown.nnz == B.nnz:
            logger.debug(f"Boolean closure saturated after {step + 1} products (n={n})")
            break
        B = grown
    return B.astype(np.float64)


def _real_series(Jr: sparse.csr_matrix, threshold: float) -> sparse.csr_matrix:
    n = Jr.shape[0]
    B = sparse.identity(n, format='csr')
    term = sparse.identity(n, format='csr')
    for k in range(1, n + 1):
        term = (term @ Jr).tocsr()
        term.data[term.data <= threshold * 1e-3] = 0.0
        term.eliminate_zeros()
        if term.nnz == 0:
            break
        peak = term.data.max()
        if not np.isfinite(peak) or peak > DIVERGENCE_BOUND:
            raise DivergenceError(f"Walk series term {k} reached magnitude {peak:.3g}")
        B = B + term
    return B.tocsr()


def reachability_closure(Jr, semiring: str = 'boolean', method: str = 'series',
                         threshold: float = None) -> sparse.csr_matrix:
    """
    Walk-series closure ``B = sum_{k=0}^{n} Jr^k`` (``(I - Jr)^-1`` for ``method='inverse'``).

    ``B[i, j] > 0`` iff ``j`` is reachable from ``i``; the diagonal is always
    positive.

    Parameters
    ----------
    Jr : sparse matrix
        Square matrix; in real arithmetic its spectral radius must be < 1
        (see :func:`scale_adjacency`).
    semiring : {'boolean', 'real'}
    method : {'series', 'inverse'}
        ``inverse`` is a dense solve, used only in real arithmetic and only
        up to ``Config.ORACLE_DENSE_LIMIT`` vertices; larger inputs fall back
        to the series.
    threshold : float, optional
        Real-mode zero threshold (default ``Config.ORACLE_THRESHOLD``).

    Raises
    ------
    NotSquareError, DivergenceError
    """
    if semiring not in SEMIRINGS:
        raise ValueError(f"Unknown semiring '{semiring}', expected one of {SEMIRINGS}")
    if method not in METHODS:
        raise ValueError(f"Unknown method '{method}', expected one of {METHODS}")
    Jr = _square(Jr)
    n = Jr.shape[0]

    if semiring == 'boolean':
        return _boolean_closure(_pattern(Jr))

    threshold = Config.ORACLE_THRESHOLD if threshold is None else threshold
    rho = spectral_radius_estimate(Jr)
    if rho >= 1.0:
        raise DivergenceError(
            f"Spectral radius estimate {rho:.6g} >= 1; scale the matrix with scale_adjacency first"
        )
    if method == 'inverse' and n > Config.ORACLE_DENSE_LIMIT:
        logger.warning(f"Dense inverse requested for n={n} > {Config.ORACLE_DENSE_LIMIT}; using the series")
        method = 'series'
    if method == 'inverse':
        B = sparse.csr_matrix(linalg.inv(np.eye(n) - Jr.toarray()))
    else:
        B = _real_series(Jr, threshold)
    B.data[B.data <= threshold] = 0.0
    B.eliminate_zeros()
    return B


def _check_compatible(Jr, M: SubDetMatrix) -> sparse.csr_matrix:
    Jr = _square(Jr)
    if Jr.shape[0] != M.cols:
        raise DimensionMismatchError(
            f"Matrix is {Jr.shape[0]}x{Jr.shape[1]}, sub-determination matrix expects {M.cols}x{M.cols}"
        )
    return Jr


def reach_sub_first(Jr, M: SubDetMatrix, semiring: str = 'boolean', **kwargs) -> sparse.csr_matrix:
    """
    Aggregate first, then close: the closure of ``M Jr M^T``.

    The aggregated matrix keeps self-loops, so in real arithmetic its
    spectral radius can reach 1; it is then rescaled on its own before the
    series. Only the nonzero pattern is meaningful.
    """
    Jr = _check_compatible(Jr, M)
    Jz = aggregate_adjacency(Jr, M)
    if semiring == 'real' and spectral_radius_estimate(Jz) >= 1.0:
        logger.debug("Aggregated matrix rescaled before closure")
        Jz = scale_adjacency(Jz)
    return reachability_closure(Jz, semiring=semiring, **kwargs)


def reach_bfs_first(Jr, M: SubDetMatrix, semiring: str = 'boolean', **kwargs) -> sparse.csr_matrix:
    """Close first, then aggregate: ``M B M^T`` with ``B`` the closure of ``Jr``."""
    Jr = _check_compatible(Jr, M)
    B = reachability_closure(Jr, semiring=semiring, **kwargs)
    Mm = M.matrix
    R = (Mm @ B @ Mm.T).tocsr()
    R.eliminate_zeros()
    return R


def off_diagonal_pattern(B) -> np.ndarray:
    """Dense boolean mask of positive off-diagonal entries."""
    mask = sparse.csr_matrix(B).toarray() > 0
    np.fill_diagonal(mask, False)
    return mask


def pattern_pairs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """1-based ``(i, j)`` pairs of a boolean mask, row-major."""
    rows, cols = np.nonzero(mask)
    return [(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols)]


def reachability_report(mag: MagGraph, zeta, semiring: str = 'boolean') -> dict:
    """
    Compare aggregate-first and close-first reachability for one MAG.

    Returns
    -------
    dict
        ``sub_first`` and ``bfs_first`` (1-based pairs), ``spurious`` (pairs
        reachable only after aggregation) and the two boolean masks.
    """
    zeta = SubDetSpec.coerce(zeta, mag.p)
    J = adjacency_matrix(to_digraph(mag))
    Jr = scale_adjacency(J) if semiring == 'real' else J
    M = build_subdet_matrix(mag.tau, zeta)
    sub_first = off_diagonal_pattern(reach_sub_first(Jr, M, semiring=semiring))
    bfs_first = off_diagonal_pattern(reach_bfs_first(Jr, M, semiring=semiring))
    spurious = sub_first & ~bfs_first
    logger.info(f"Reachability oracle zeta={zeta}: {int(sub_first.sum())} aggregate pairs, "
                f"{int(bfs_first.sum())} real pairs, {int(spurious.sum())} spurious")
    return {
        'zeta': str(zeta),
        'semiring': semiring,
        'sub_first': pattern_pairs(sub_first),
        'bfs_first': pattern_pairs(bfs_first),
        'spurious': pattern_pairs(spurious),
        'sub_first_mask': sub_first,
        'bfs_first_mask': bfs_first,
    }
