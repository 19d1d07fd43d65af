"""
Shortest-path centralities on composite and sub-determined vertices.

Betweenness follows Brandes' accumulation: one breadth-first search per
source, then dependencies are pushed back along the predecessor lists in
reverse finishing order. Scores are directed and unnormalized, with path
endpoints excluded.

Sub-determined variants run the search over the FULL composite digraph,
seeded with every composite vertex of the source class, while distances,
path counts and predecessors are kept per class. Paths that exist only in
the aggregated graph are never followed. Two distance semantics exist:

``faithful``
    The class-keyed search as the sub-determined betweenness algorithm
    states it: composite vertices are dequeued in composite-hop order and
    a class keeps the distance at which it was first seen. Path counts
    are kept per class, so a prefix reaching one member of a class is
    combined with arcs leaving any other member. ``sigma`` can therefore
    count class sequences no composite walk realizes.
``exact``
    0-1 BFS over composite vertices (intra-class arcs cost 0, all others
    cost 1) gives the minimal number of class transitions. Path counting
    runs on ``(class, frontier)`` states, where the frontier is the set of
    composite vertices a class-sequence prefix can stand on. ``sigma``
    counts exactly the class sequences some composite walk realizes, and
    betweenness credits a class once per sequence that contains it.

Both semantics agree on which classes are reachable.

Path counts ``sigma`` are Python integers, so they never overflow; the
ratios ``sigma[v] / sigma[w]`` are correctly rounded floats.
"""

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from config import Config
from logging_config import setup_logging
from mag_core import (
    CompanionTuple,
    CompositeDigraph,
    CompositeVertex,
    MagError,
    MagGraph,
    composite_keys,
    encode_composite,
    to_digraph,
)
from subdet import SubDetSpec, aggregate_mag, class_codes, sub_companion_tuple

logger = setup_logging(__name__)

MEASURES = ('betweenness', 'closeness', 'pathstats')
MODES = ('composite', 'subdet', 'naive-aggregate')
DISTANCES = ('faithful', 'exact')
CLOSENESS_MODES = ('harmonic', 'classic')


class UnknownClassError(MagError):
    """Raised when a source class is outside the sub-determined vertex set."""
    pass


class TooLargeError(MagError):
    """Raised when brute-force enumeration is asked for a graph above its size limit."""
    pass


# ========================================
# Result types
# ========================================

@dataclass
class SsspState:
    """
    Single-source search state.

    ``dist`` is -1 for unreachable targets; ``order`` lists targets in the
    order they finished (non-decreasing distance for plain BFS).
    """

    source: int
    dist: List[int]
    sigma: List[int]
    preds: List[List[int]]
    order: List[int]

    def reachable(self) -> List[int]:
        return [t for t, d in enumerate(self.dist) if d >= 0 and t != self.source]


@dataclass(frozen=True)
class CentralityVector:
    """Nonnegative scores keyed by (sub-determined) composite vertex label tuples, in codec order."""

    keys: Tuple[Tuple[str, ...], ...]
    scores: np.ndarray
    measure: str = ''

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.shape != (len(self.keys),):
            raise MagError(f"{len(self.keys)} vertices but {scores.size} scores")
        scores.setflags(write=False)
        object.__setattr__(self, 'scores', scores)

    def __len__(self) -> int:
        return len(self.keys)

    def labels(self) -> List[str]:
        """Rendered vertex labels: ``(a|b)`` for tuples, bare label for single elements."""
        return [render_key(k) for k in self.keys]

    def __add__(self, other: 'CentralityVector') -> 'CentralityVector':
        if self.keys != other.keys:
            raise MagError("Cannot merge centrality vectors over different vertex sets")
        return CentralityVector(self.keys, self.scores + other.scores, self.measure)


def render_key(key: Tuple[str, ...]) -> str:
    return key[0] if len(key) == 1 else '(' + '|'.join(key) + ')'


def merge_partials(partials: Sequence[CentralityVector]) -> CentralityVector:
    """Sum per-worker partial vectors (e.g. from disjoint source subsets)."""
    if not partials:
        raise MagError("Nothing to merge")
    total = partials[0]
    for part in partials[1:]:
        total = total + part
    return total


# ========================================
# Composite vertices (plain digraph)
# ========================================

def bfs_sssp(g: CompositeDigraph, s: int) -> SsspState:
    """Unweighted single-source shortest paths from 0-based vertex ``s``."""
    n = g.n
    dist = [-1] * n
    sigma = [0] * n
    preds: List[List[int]] = [[] for _ in range(n)]
    order = []
    dist[s], sigma[s] = 0, 1
    queue = deque([s])
    out_adj = g.out_adj
    while queue:
        v = queue.popleft()
        order.append(v)
        dv = dist[v] + 1
        for w in out_adj[v]:
            if dist[w] < 0:
                dist[w] = dv
                queue.append(w)
            if dist[w] == dv:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return SsspState(source=s, dist=dist, sigma=sigma, preds=preds, order=order)


def _accumulate(state: SsspState, scores: List[float]) -> None:
    sigma, preds = state.sigma, state.preds
    delta = [0.0] * len(sigma)
    for w in reversed(state.order):
        coeff = 1.0 + delta[w]
        sigma_w = sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] / sigma_w * coeff
        if w != state.source:
            scores[w] += delta[w]


def betweenness_composite(g: CompositeDigraph, sources: Optional[Iterable[int]] = None,
                          progress: bool = False) -> CentralityVector:
    """
    Brandes betweenness of every vertex of ``g``.

    Parameters
    ----------
    g : CompositeDigraph
    sources : iterable of int, optional
        0-based sources to accumulate over (default: all). Partial vectors
        over a partition of the sources sum to the full result.
    progress : bool
        Show a tqdm progress bar.

    Returns
    -------
    CentralityVector
    """
    scores = [0.0] * g.n
    sources = range(g.n) if sources is None else list(sources)
    for s in tqdm(sources, desc='Betweenness', unit='src', disable=not progress):
        _accumulate(bfs_sssp(g, s), scores)
    return CentralityVector(g.vertex_keys(), np.array(scores), 'betweenness')


def _closeness(dist: Sequence[int], source: int, n: int, mode: str) -> float:
    reached = [d for t, d in enumerate(dist) if d > 0 and t != source]
    if mode == 'harmonic':
        return float(sum(1.0 / d for d in reached))
    if mode == 'classic':
        r = len(reached) + 1
        if r <= 1:
            return 0.0
        return (r - 1) ** 2 / ((n - 1) * sum(reached))
    raise ValueError(f"Unknown closeness mode '{mode}', expected one of {CLOSENESS_MODES}")


def closeness_composite(g: CompositeDigraph, mode: str = None) -> CentralityVector:
    """
    Closeness of every vertex from its outgoing distances.

    ``harmonic``: sum of ``1/d(v, u)`` over reachable ``u != v``.
    ``classic``: ``(r - 1)^2 / ((n - 1) * sum d(v, u))`` over the ``r`` vertices
    reachable from ``v`` (itself included), 0 when ``r <= 1``.
    """
    mode = mode or Config.CLOSENESS_MODE
    scores = [_closeness(bfs_sssp(g, s).dist, s, g.n, mode) for s in range(g.n)]
    return CentralityVector(g.vertex_keys(), np.array(scores), 'closeness')


# ========================================
# Sub-determined vertices
# ========================================

@dataclass
class _SubDetContext:
    """Composite adjacency plus the class of every composite vertex."""

    zeta: SubDetSpec
    sub_tau: CompanionTuple
    out_adj: Tuple[Tuple[int, ...], ...]
    cls: List[int]
    members: List[List[int]]
    keys: Tuple[Tuple[str, ...], ...] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.cls)

    @property
    def n_zeta(self) -> int:
        return len(self.members)


def _context(mag: MagGraph, zeta) -> _SubDetContext:
    zeta = SubDetSpec.coerce(zeta, mag.p)
    sub_tau = sub_companion_tuple(mag.tau, zeta)
    n_zeta = sub_tau.n
    cls = class_codes(mag.tau, zeta).tolist()
    members: List[List[int]] = [[] for _ in range(n_zeta)]
    for v, c in enumerate(cls):
        members[c].append(v)
    return _SubDetContext(
        zeta=zeta,
        sub_tau=sub_tau,
        out_adj=to_digraph(mag).out_adj,
        cls=cls,
        members=members,
        keys=composite_keys([mag.aspects[i] for i in zeta.kept]),
    )


def _faithful_sub_bfs(ctx: _SubDetContext, s: int) -> SsspState:
    n_zeta, cls, out_adj = ctx.n_zeta, ctx.cls, ctx.out_adj
    color = bytearray(ctx.n)
    color_zeta = bytearray(n_zeta)
    order: List[int] = []
    preds: List[List[int]] = [[] for _ in range(n_zeta)]
    sigma = [0] * n_zeta
    dist = [-1] * n_zeta
    sigma[s], dist[s] = 1, 0

    queue = deque()
    for i in ctx.members[s]:
        color[i] = 1
        queue.append(i)

    while queue:
        v = queue.popleft()
        vz = cls[v]
        if not color_zeta[vz]:
            color_zeta[vz] = 1
            order.append(vz)
        dv = dist[vz] + 1
        for w in out_adj[v]:
            if not color[w]:
                color[w] = 1
                queue.append(w)
            wz = cls[w]
            if dist[wz] == -1:
                dist[wz] = dv
            if dist[wz] == dv:
                sigma[wz] += sigma[vz]
                preds[wz].append(vz)
    # Intra-class arcs let composite hops run ahead of class distance, so
    # first-dequeue order can put a class after one it precedes.
    order.sort(key=dist.__getitem__)
    return SsspState(source=s, dist=dist, sigma=sigma, preds=preds, order=order)


@dataclass
class _SequenceDag:
    """
    Shortest realizable class sequences as a DAG over ``(class, frontier)`` states.

    State 0 is the source class with all of its members. A state at level
    ``L`` holds the composite vertices at transition distance ``L`` that a
    prefix of ``L`` transitions can stand on; the next state is fixed by the
    next class, so DAG paths and realizable prefixes correspond one to one.
    """

    state_class: List[int]
    state_level: List[int]
    frontier: List[Tuple[int, ...]]
    sigma: List[int]
    preds: List[List[int]]
    class_dist: List[int]
    targets: List[List[int]] = field(default_factory=list)

    def is_target(self, st: int) -> bool:
        return self.state_level[st] == self.class_dist[self.state_class[st]]

    def class_sigma(self, sigma: Sequence[int] = None) -> List[int]:
        sigma = self.sigma if sigma is None else sigma
        return [sum(sigma[st] for st in states) for states in self.targets]


def transition_distances(ctx: _SubDetContext, s: int) -> List[int]:
    """0-1 BFS: minimal class transitions from class ``s`` to each composite vertex (-1 if unreachable)."""
    cls, out_adj = ctx.cls, ctx.out_adj
    D = [-1] * ctx.n
    dq = deque()
    for i in ctx.members[s]:
        D[i] = 0
        dq.append(i)
    while dq:
        v = dq.popleft()
        cv, dv = cls[v], D[v]
        for w in out_adj[v]:
            step = 0 if cls[w] == cv else 1
            if D[w] < 0 or dv + step < D[w]:
                D[w] = dv + step
                if step:
                    dq.append(w)
                else:
                    dq.appendleft(w)
    return D


def _close_within_class(ctx: _SubDetContext, seeds: Iterable[int], c: int,
                        D: Sequence[int] = None, level: int = -1) -> FrozenSet[int]:
    """Vertices reached from ``seeds`` along arcs inside class ``c`` (only those with ``D == level`` when ``D`` is given)."""
    cls, out_adj = ctx.cls, ctx.out_adj
    reached = set(seeds)
    stack = list(reached)
    while stack:
        v = stack.pop()
        for w in out_adj[v]:
            if w not in reached and cls[w] == c and (D is None or D[w] == level):
                reached.add(w)
                stack.append(w)
    return frozenset(reached)


def _exact_sequence_dag(ctx: _SubDetContext, s: int) -> _SequenceDag:
    cls, out_adj = ctx.cls, ctx.out_adj
    D = transition_distances(ctx, s)
    dag = _SequenceDag(
        state_class=[s], state_level=[0], frontier=[tuple(ctx.members[s])],
        sigma=[1], preds=[[]], class_dist=[-1] * ctx.n_zeta,
    )
    dag.class_dist[s] = 0

    # Every vertex on a walk realizing a shortest sequence sits at D == its position.
    start, level = 0, 0
    while start < len(dag.state_class):
        end = len(dag.state_class)
        state_of: Dict[Tuple[int, FrozenSet[int]], int] = {}
        for u in range(start, end):
            cu = dag.state_class[u]
            seeds: Dict[int, List[int]] = {}
            for v in dag.frontier[u]:
                for w in out_adj[v]:
                    if D[w] == level + 1 and cls[w] != cu:
                        seeds.setdefault(cls[w], []).append(w)
            for c, group in seeds.items():
                frontier = _close_within_class(ctx, group, c, D, level + 1)
                st = state_of.get((c, frontier))
                if st is None:
                    st = state_of[(c, frontier)] = len(dag.state_class)
                    dag.state_class.append(c)
                    dag.state_level.append(level + 1)
                    dag.frontier.append(tuple(sorted(frontier)))
                    dag.sigma.append(0)
                    dag.preds.append([])
                    if dag.class_dist[c] < 0:
                        dag.class_dist[c] = level + 1
                dag.preds[st].append(u)
                dag.sigma[st] += dag.sigma[u]
        start, level = end, level + 1

    dag.targets = [[] for _ in range(ctx.n_zeta)]
    for st, c in enumerate(dag.state_class):
        if dag.is_target(st):
            dag.targets[c].append(st)
    return dag


def _class_index(ctx: _SubDetContext, source_class) -> int:
    if isinstance(source_class, CompositeVertex):
        try:
            index = encode_composite(source_class, ctx.sub_tau)
        except MagError as e:
            raise UnknownClassError(f"Class {source_class.elements} is not a class of zeta={ctx.zeta}: {e}") from None
    else:
        index = int(source_class)
    if not 1 <= index <= ctx.n_zeta:
        raise UnknownClassError(f"Source class {index} out of range [1, {ctx.n_zeta}]")
    return index - 1


def sub_bfs(mag: MagGraph, zeta, source_class, distance: str = None) -> SsspState:
    """
    Class-level search from one source class over the full composite digraph.

    Parameters
    ----------
    mag : MagGraph
    zeta : SubDetSpec, int, str or 0/1 sequence
    source_class : int or CompositeVertex
        1-based class index, or the class as a composite vertex over the
        kept aspects.
    distance : {'faithful', 'exact'}, optional

    Returns
    -------
    SsspState
        Keyed by 0-based class. In ``faithful`` mode ``order`` is the
        class first-dequeue order re-sorted by class distance, since
        intra-class arcs let composite hops run ahead of class distance;
        ``sigma`` may count class sequences no composite walk realizes. In
        ``exact`` mode ``sigma[t]`` is the number of realizable shortest
        class sequences and ``preds[t]`` the distinct classes standing
        right before ``t`` on one of them.
    """
    distance = distance or Config.DISTANCE_MODE
    ctx = _context(mag, zeta)
    s = _class_index(ctx, source_class)
    if distance == 'faithful':
        return _faithful_sub_bfs(ctx, s)
    if distance == 'exact':
        dag = _exact_sequence_dag(ctx, s)
        dist = dag.class_dist
        preds = [sorted({dag.state_class[u] for st in states for u in dag.preds[st]})
                 for states in dag.targets]
        order = sorted((c for c, d in enumerate(dist) if d >= 0), key=lambda c: (dist[c], c))
        return SsspState(source=s, dist=dist, sigma=dag.class_sigma(), preds=preds, order=order)
    raise ValueError(f"Unknown distance mode '{distance}', expected one of {DISTANCES}")


def class_paths(mag: MagGraph, zeta, source_class, target_class, distance: str = None) -> List[Tuple[int, ...]]:
    """
    Every shortest class sequence the search counts from one class to another.

    Sequences are tuples of 0-based classes, source first. In ``exact`` mode
    there are ``sub_bfs(...).sigma[t]`` of them and each is realized by some
    composite walk. In ``faithful`` mode they are the distinct walks along
    ``preds``. The list grows with the path count, so keep inputs small.
    """
    distance = distance or Config.DISTANCE_MODE
    ctx = _context(mag, zeta)
    s = _class_index(ctx, source_class)
    t = _class_index(ctx, target_class)
    paths = []
    if distance == 'exact':
        dag = _exact_sequence_dag(ctx, s)
        stack = [(st, (t,)) for st in dag.targets[t]]
        while stack:
            st, tail = stack.pop()
            if st == 0:
                paths.append(tail)
                continue
            for u in dag.preds[st]:
                stack.append((u, (dag.state_class[u],) + tail))
    elif distance == 'faithful':
        state = _faithful_sub_bfs(ctx, s)
        stack = [(t, (t,))] if state.dist[t] >= 0 else []
        while stack:
            c, tail = stack.pop()
            if c == s:
                paths.append(tail)
                continue
            for u in set(state.preds[c]):
                stack.append((u, (u,) + tail))
    else:
        raise ValueError(f"Unknown distance mode '{distance}', expected one of {DISTANCES}")
    return sorted(paths)


def _avoiding_sigma(dag: _SequenceDag, c: int) -> List[int]:
    """State path counts with every state of class ``c`` removed."""
    sigma = [0] * len(dag.sigma)
    sigma[0] = 1
    for st in range(1, len(sigma)):
        if dag.state_class[st] != c:
            sigma[st] = sum(sigma[u] for u in dag.preds[st])
    return sigma


def _accumulate_sequences(dag: _SequenceDag, scores: List[float]) -> None:
    sigma, preds, state_class = dag.sigma, dag.preds, dag.state_class
    class_sigma = dag.class_sigma()
    delta = [0.0] * len(sigma)
    credit = [0.0] * len(class_sigma)
    levels = defaultdict(set)
    # States were created level by level, so reverse creation order is a valid finishing order.
    for st in range(len(sigma) - 1, 0, -1):
        c = state_class[st]
        levels[c].add(dag.state_level[st])
        coeff = (sigma[st] / class_sigma[c] if dag.is_target(st) else 0.0) + delta[st]
        for u in preds[st]:
            delta[u] += sigma[u] / sigma[st] * coeff
        credit[c] += delta[st]

    # A class met at several levels can appear twice in one sequence; count it once.
    source = state_class[0]
    for c, seen in levels.items():
        if len(seen) < 2:
            continue
        avoiding = dag.class_sigma(_avoiding_sigma(dag, c))
        credit[c] = sum((class_sigma[t] - avoiding[t]) / class_sigma[t]
                        for t in range(len(class_sigma))
                        if t not in (c, source) and class_sigma[t])

    for c, value in enumerate(credit):
        scores[c] += value


def betweenness_subdet(mag: MagGraph, zeta, distance: str = None,
                       sources: Optional[Iterable[int]] = None,
                       progress: bool = False) -> CentralityVector:
    """
    Sub-determined betweenness, free of paths that exist only after aggregation.

    Parameters
    ----------
    mag : MagGraph
    zeta : SubDetSpec, int, str or 0/1 sequence
    distance : {'faithful', 'exact'}, optional
        Default ``Config.DISTANCE_MODE``.
    sources : iterable of int, optional
        0-based source classes (default: all).
    progress : bool

    Returns
    -------
    CentralityVector
        One score per class, in sub-determined codec order.
    """
    distance = distance or Config.DISTANCE_MODE
    if distance not in DISTANCES:
        raise ValueError(f"Unknown distance mode '{distance}', expected one of {DISTANCES}")
    ctx = _context(mag, zeta)
    scores = [0.0] * ctx.n_zeta
    sources = range(ctx.n_zeta) if sources is None else list(sources)
    for s in tqdm(sources, desc='Sub-determined betweenness', unit='class', disable=not progress):
        if distance == 'faithful':
            _accumulate(_faithful_sub_bfs(ctx, s), scores)
        else:
            _accumulate_sequences(_exact_sequence_dag(ctx, s), scores)
    logger.debug(f"Sub-determined betweenness zeta={ctx.zeta} distance={distance} n_zeta={ctx.n_zeta}")
    return CentralityVector(ctx.keys, np.array(scores), 'betweenness')


def _class_distances(ctx: _SubDetContext, s: int, distance: str) -> List[int]:
    if distance == 'faithful':
        return _faithful_sub_bfs(ctx, s).dist
    if distance == 'exact':
        D = transition_distances(ctx, s)
        dist = [-1] * ctx.n_zeta
        for v, d in enumerate(D):
            c = ctx.cls[v]
            if d >= 0 and (dist[c] < 0 or d < dist[c]):
                dist[c] = d
        return dist
    raise ValueError(f"Unknown distance mode '{distance}', expected one of {DISTANCES}")


def sub_reachability(mag: MagGraph, zeta, distance: str = None) -> np.ndarray:
    """Class-to-class reachability of the sub-determined search as a boolean matrix, diagonal cleared."""
    distance = distance or Config.DISTANCE_MODE
    ctx = _context(mag, zeta)
    mask = np.zeros((ctx.n_zeta, ctx.n_zeta), dtype=bool)
    for s in range(ctx.n_zeta):
        mask[s] = np.asarray(_class_distances(ctx, s, distance)) >= 0
        mask[s, s] = False
    return mask


def closeness_subdet(mag: MagGraph, zeta, mode: str = None, distance: str = None) -> CentralityVector:
    """Closeness over class distances of the sub-determined search (see :func:`closeness_composite`)."""
    mode = mode or Config.CLOSENESS_MODE
    distance = distance or Config.DISTANCE_MODE
    ctx = _context(mag, zeta)
    scores = [_closeness(_class_distances(ctx, s, distance), s, ctx.n_zeta, mode)
              for s in range(ctx.n_zeta)]
    return CentralityVector(ctx.keys, np.array(scores), 'closeness')


# ========================================
# Path statistics
# ========================================

def _summarize_distances(rows: Iterable[Tuple[int, Sequence[int]]], n: int) -> dict:
    total, count, diameter = 0, 0, 0
    for s, dist in rows:
        for t, d in enumerate(dist):
            if t != s and d > 0:
                total += d
                count += 1
                diameter = max(diameter, d)
    return {
        'vertices': n,
        'reachable_pairs': count,
        'characteristic_path_length': total / count if count else 0.0,
        'diameter': diameter,
    }


def path_statistics(g: CompositeDigraph) -> dict:
    """Mean and maximum shortest-path length over ordered reachable pairs."""
    return _summarize_distances(((s, bfs_sssp(g, s).dist) for s in range(g.n)), g.n)


def path_statistics_subdet(mag: MagGraph, zeta, distance: str = None) -> dict:
    """Same as :func:`path_statistics` over class distances, spurious paths excluded."""
    distance = distance or Config.DISTANCE_MODE
    ctx = _context(mag, zeta)
    rows = ((s, _class_distances(ctx, s, distance)) for s in range(ctx.n_zeta))
    return _summarize_distances(rows, ctx.n_zeta)


# ========================================
# Oracles
# ========================================

def betweenness_bruteforce(g: CompositeDigraph, max_n: int = None) -> CentralityVector:
    """
    Betweenness by explicit enumeration of every shortest path.

    For each ordered pair ``(s, t)`` the shortest paths are listed by a
    depth-first walk along BFS layers; each interior vertex earns the
    fraction of those paths that pass through it.

    Raises
    ------
    TooLargeError
        If ``g.n`` exceeds ``max_n`` (default ``Config.BRUTEFORCE_MAX_N``).
    """
    max_n = max_n or Config.BRUTEFORCE_MAX_N
    if g.n > max_n:
        raise TooLargeError(f"Brute force limited to n <= {max_n}, got n={g.n}")
    scores = [0.0] * g.n
    for s in range(g.n):
        dist = bfs_sssp(g, s).dist
        paths_to = {t: [] for t in range(g.n) if t != s and dist[t] > 0}
        stack = [(s, (s,))]
        while stack:
            v, path = stack.pop()
            if v in paths_to:
                paths_to[v].append(path)
            for w in g.out_adj[v]:
                if dist[w] == dist[v] + 1:
                    stack.append((w, path + (w,)))
        for t, paths in paths_to.items():
            through = [0] * g.n
            for path in paths:
                for v in path[1:-1]:
                    through[v] += 1
            for v, count in enumerate(through):
                if count:
                    scores[v] += count / len(paths)
    return CentralityVector(g.vertex_keys(), np.array(scores), 'betweenness')


def betweenness_subdet_bruteforce(mag: MagGraph, zeta, max_n: int = None) -> CentralityVector:
    """
    Sub-determined betweenness by listing every realizable class sequence.

    Sequences grow one class transition at a time together with the set of
    composite vertices their prefix can stand on, with no distance pruning.
    A target's shortest sequences are those of the length at which its class
    first shows up; each interior class earns the fraction of them that
    contain it. Matches ``betweenness_subdet(..., distance='exact')``.

    Raises
    ------
    TooLargeError
        If the composite digraph has more than ``max_n`` vertices
        (default ``Config.BRUTEFORCE_MAX_N``).
    """
    max_n = max_n or Config.BRUTEFORCE_MAX_N
    ctx = _context(mag, zeta)
    if ctx.n > max_n:
        raise TooLargeError(f"Brute force limited to n <= {max_n}, got n={ctx.n}")
    cls, out_adj = ctx.cls, ctx.out_adj
    scores = [0.0] * ctx.n_zeta
    for s in range(ctx.n_zeta):
        seen = set(ctx.members[s])
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for w in out_adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        reachable = {cls[v] for v in seen}

        dist = {s: 0}
        shortest: Dict[int, List[Tuple[int, ...]]] = defaultdict(list)
        layer = [((s,), frozenset(ctx.members[s]))]
        while layer and len(dist) < len(reachable):
            grown = []
            for seq, frontier in layer:
                seeds: Dict[int, List[int]] = {}
                for v in sorted(frontier):
                    for w in out_adj[v]:
                        if cls[w] != seq[-1]:
                            seeds.setdefault(cls[w], []).append(w)
                for c, group in seeds.items():
                    grown.append((seq + (c,), _close_within_class(ctx, group, c)))
            fresh = {seq[-1] for seq, _ in grown if seq[-1] not in dist}
            for c in fresh:
                dist[c] = len(grown[0][0]) - 1
            for seq, _ in grown:
                if seq[-1] in fresh:
                    shortest[seq[-1]].append(seq)
            layer = grown

        for t, seqs in shortest.items():
            through = defaultdict(int)
            for seq in seqs:
                for c in set(seq[1:-1]):
                    through[c] += 1
            for c, count in through.items():
                scores[c] += count / len(seqs)
    return CentralityVector(ctx.keys, np.array(scores), 'betweenness')


# ========================================
# Dispatch
# ========================================

def compute_centrality(mag: MagGraph, measure: str, mode: str, zeta=None, distance: str = None,
                       closeness: str = None, progress: bool = False):
    """
    Run one measure in one mode; ``pathstats`` returns a dict, the others a CentralityVector.

    ``composite`` works on the full digraph, ``naive-aggregate`` on the
    aggregated digraph (spurious paths included) and ``subdet`` on
    sub-determined classes (spurious paths excluded).
    """
    if measure not in MEASURES:
        raise ValueError(f"Unknown measure '{measure}', expected one of {MEASURES}")
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}', expected one of {MODES}")
    if mode != 'composite' and zeta is None:
        raise MagError(f"Mode '{mode}' needs a sub-determination (--zeta)")

    if mode == 'subdet':
        if measure == 'betweenness':
            return betweenness_subdet(mag, zeta, distance=distance, progress=progress)
        if measure == 'closeness':
            return closeness_subdet(mag, zeta, mode=closeness, distance=distance)
        return path_statistics_subdet(mag, zeta, distance=distance)

    g = to_digraph(mag) if mode == 'composite' else aggregate_mag(mag, zeta)
    if measure == 'betweenness':
        return betweenness_composite(g, progress=progress)
    if measure == 'closeness':
        return closeness_composite(g, mode=closeness)
    return path_statistics(g)
