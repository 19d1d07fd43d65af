"""
Rankings and Rank-Biased Overlap (RBO) comparison.

RBO weighs agreement at depth ``d`` by ``p^(d-1)``, so the persistence ``p``
controls how top-heavy the comparison is. ``solve_persistence`` picks the
``p`` that puts a given fraction of the total weight on the first ``d``
positions (85% on the top 10% by default). RBD is ``1 - RBO``.
"""

import math
from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from config import Config
from logging_config import setup_logging
from mag_core import MagError

logger = setup_logging(__name__)

TIE_RULES = ('identifier', 'average-overlap')


class NoSolutionError(MagError):
    """Raised when no persistence in (0, 1) gives the requested prefix weight."""
    pass


class UniverseMismatchError(MagError):
    """Raised when two rankings do not rank the same items."""
    pass


@dataclass(frozen=True)
class Ranking:
    """
    Items best first, plus the tie groups found while ranking.

    ``tie_groups`` holds ``(start, end)`` 1-based inclusive position ranges
    of items with equal score (groups of one are omitted). ``tie_rule``
    decides how RBO treats them: ``identifier`` uses the listed order,
    ``average-overlap`` spreads each group evenly over its positions.
    """

    items: Tuple[Hashable, ...]
    tie_rule: str = 'identifier'
    tie_groups: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.tie_rule not in TIE_RULES:
            raise ValueError(f"Unknown tie rule '{self.tie_rule}', expected one of {TIE_RULES}")
        if len(set(self.items)) != len(self.items):
            raise MagError("Ranking items must be distinct")

    def __len__(self) -> int:
        return len(self.items)

    def group_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-position ``(start, size)`` of the tie group covering it."""
        start = np.arange(1, len(self.items) + 1)
        size = np.ones(len(self.items), dtype=np.int64)
        for s, e in self.tie_groups:
            start[s - 1:e] = s
            size[s - 1:e] = e - s + 1
        return start, size


def to_ranking(scores, tie_rule: str = 'identifier', items: Optional[Sequence[Hashable]] = None) -> Ranking:
    """
    Rank by score descending; equal scores keep identifier order.

    Parameters
    ----------
    scores : CentralityVector or sequence of float
        Scores in identifier order.
    tie_rule : {'identifier', 'average-overlap'}
    items : sequence, optional
        Identifiers for the scores (default: 1-based positions).

    Returns
    -------
    Ranking
    """
    values = np.asarray(getattr(scores, 'scores', scores), dtype=np.float64)
    if values.size == 0:
        raise MagError("Cannot rank an empty score vector")
    ids = list(range(1, values.size + 1)) if items is None else list(items)
    # stable sort on the negated score keeps identifier order within ties
    order = np.argsort(-values, kind='stable')
    ranked = values[order]
    groups = []
    start = 0
    for pos in range(1, ranked.size + 1):
        if pos == ranked.size or ranked[pos] != ranked[start]:
            if pos - start > 1:
                groups.append((start + 1, pos))
            start = pos
    return Ranking(tuple(ids[i] for i in order), tie_rule, tuple(groups))


def prefix_weight(depth: int, p: float) -> float:
    """
    Share of the total RBO weight carried by the first ``depth`` positions.

    ``1 - p^(d-1) + (1-p)/p * d * (ln(1/(1-p)) - sum_{i<d} p^i / i)``
    """
    if depth < 1:
        raise NoSolutionError(f"Depth must be at least 1, got {depth}")
    i = np.arange(1, depth)
    partial = float(np.sum(p ** i / i)) if depth > 1 else 0.0
    return 1.0 - p ** (depth - 1) + (1.0 - p) / p * depth * (-math.log1p(-p) - partial)


def solve_persistence(weight: float, depth: int, xtol: float = 1e-10) -> float:
    """
    Persistence ``p`` such that the first ``depth`` positions carry ``weight`` of the total.

    The prefix weight falls from 1 to 0 as ``p`` runs over (0, 1), so the
    root is bracketed and found by bisection.

    Raises
    ------
    NoSolutionError
        If ``weight`` is outside (0, 1) or ``depth < 1``.
    """
    if not 0.0 < weight < 1.0:
        raise NoSolutionError(f"Weight fraction must be in (0, 1), got {weight}")
    if depth < 1:
        raise NoSolutionError(f"Depth must be at least 1, got {depth}")
    lo, hi = 1e-12, 1.0 - 1e-12
    f = lambda p: prefix_weight(depth, p) - weight  # noqa: E731
    if f(lo) * f(hi) > 0:
        raise NoSolutionError(f"No persistence gives weight {weight} at depth {depth}")
    p = optimize.bisect(f, lo, hi, xtol=xtol)
    logger.debug(f"Persistence p={p:.10f} for weight={weight} depth={depth}")
    return float(p)


def depth_for(fraction: float, length: int) -> int:
    """Number of top positions covered by ``fraction`` of a ranking of ``length``."""
    return max(1, int(round(fraction * length)))


def persistence_for(length: int, weight: float = None, depth_fraction: float = None) -> float:
    """Persistence from the configured (weight, depth fraction) for a ranking of ``length``."""
    weight = Config.RBO_WEIGHT if weight is None else weight
    depth_fraction = Config.RBO_DEPTH if depth_fraction is None else depth_fraction
    return solve_persistence(weight, depth_for(depth_fraction, length))


def _positions(r: Ranking, universe: dict) -> Tuple[np.ndarray, np.ndarray]:
    """Group start and group size of every universe item in ``r``."""
    start, size = r.group_bounds()
    idx = np.fromiter((universe[x] for x in r.items), dtype=np.int64, count=len(r))
    out_start = np.empty(len(r), dtype=np.int64)
    out_size = np.empty(len(r), dtype=np.int64)
    out_start[idx] = start
    out_size[idx] = size
    if r.tie_rule == 'identifier':
        out_start[idx] = np.arange(1, len(r) + 1)
        out_size[idx] = 1
    return out_start, out_size


def overlaps(a: Ranking, b: Ranking, depth: int) -> np.ndarray:
    """Prefix overlaps ``X_1 .. X_depth`` (fractional inside tie groups in average-overlap mode)."""
    universe = {x: i for i, x in enumerate(a.items)}
    sa, za = _positions(a, universe)
    sb, zb = _positions(b, universe)
    if (za == 1).all() and (zb == 1).all():
        first_common = np.maximum(sa, sb)
        counts = np.bincount(first_common, minlength=depth + 1)[1:depth + 1]
        return np.cumsum(counts).astype(np.float64)
    X = np.empty(depth)
    for k in range(1, depth + 1):
        ma = np.clip((k - sa + 1) / za, 0.0, 1.0)
        mb = np.clip((k - sb + 1) / zb, 0.0, 1.0)
        X[k - 1] = np.minimum(ma, mb).sum()
    return X


def rbo(a: Ranking, b: Ranking, p: float, truncate: Optional[int] = None) -> float:
    """
    Extrapolated RBO of two rankings of the same items.

    ``(1-p) * sum_{d=1}^{L} p^(d-1) * A_d + p^L * A_L`` with ``A_d = X_d / d``
    and ``L`` the ranking length, or ``truncate`` when given.

    Raises
    ------
    UniverseMismatchError
        If the rankings do not contain the same items.
    """
    if set(a.items) != set(b.items):
        missing = set(a.items) ^ set(b.items)
        raise UniverseMismatchError(
            f"Rankings differ on {len(missing)} items (e.g. {sorted(map(str, missing))[:5]})"
        )
    if not 0.0 < p < 1.0:
        raise NoSolutionError(f"Persistence must be in (0, 1), got {p}")
    depth = len(a) if truncate is None else max(1, min(int(truncate), len(a)))
    X = overlaps(a, b, depth)
    d = np.arange(1, depth + 1)
    A = X / d
    score = (1.0 - p) * float(np.sum(p ** (d - 1) * A)) + p ** depth * float(A[-1])
    return min(1.0, max(0.0, score))


def rbd(a: Ranking, b: Ranking, p: float, truncate: Optional[int] = None) -> float:
    """Rank-Biased Distance ``1 - RBO``."""
    return 1.0 - rbo(a, b, p, truncate=truncate)


def top_k_table(a: Ranking, b: Ranking, k: int, labels: Optional[dict] = None) -> pd.DataFrame:
    """
    Position-by-position view of the two top-``k`` lists.

    Columns ``position``, ``first``, ``second`` and ``first_rank_in_second`` /
    ``second_rank_in_first`` (1-based rank of the item in the other
    ranking), plus ``in_both_top`` flags for the shared top-``k`` items.
    """
    k = min(k, len(a), len(b))
    rank_a = {x: i for i, x in enumerate(a.items, start=1)}
    rank_b = {x: i for i, x in enumerate(b.items, start=1)}
    top_a, top_b = set(a.items[:k]), set(b.items[:k])
    show = (lambda x: labels.get(x, x)) if labels else (lambda x: x)
    rows: List[dict] = []
    for pos in range(k):
        x, y = a.items[pos], b.items[pos]
        rows.append({
            'position': pos + 1,
            'first': show(x),
            'first_rank_in_second': rank_b.get(x),
            'second': show(y),
            'second_rank_in_first': rank_a.get(y),
            'first_in_both_top': x in top_b,
            'second_in_both_top': y in top_a,
        })
    return pd.DataFrame(rows)
