"""
Seeded Erdos-Renyi random MAGs in the G(n, m) model.

Exactly ``m`` distinct non-loop composite edges are drawn uniformly without
replacement. Sampling uses Floyd's algorithm over pair indices, so the work
is proportional to ``m`` rather than to the ``n (n - 1)`` candidate pairs.
The generator is numpy's PCG64; ensemble members get child seeds from
``SeedSequence(seed, spawn_key=(index,))``.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from logging_config import setup_logging
from mag_core import Aspect, MagError, MagGraph, mag_from_codes

logger = setup_logging(__name__)


class TooManyEdgesError(MagError):
    """Raised when more edges are requested than there are candidate pairs."""
    pass


class InvalidGenSpecError(MagError):
    """Raised for non-positive aspect sizes or edge counts."""
    pass


@dataclass(frozen=True)
class GenSpec:
    """Aspect sizes, exact edge count and seed of one random MAG."""

    aspect_sizes: Tuple[int, ...]
    edge_count: int
    seed: int = 0
    reciprocal: bool = False

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.aspect_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise InvalidGenSpecError(f"Aspect sizes must be positive, got {sizes}")
        if int(self.edge_count) < 0:
            raise InvalidGenSpecError(f"Edge count must be non-negative, got {self.edge_count}")
        object.__setattr__(self, 'aspect_sizes', sizes)
        object.__setattr__(self, 'edge_count', int(self.edge_count))
        object.__setattr__(self, 'seed', int(self.seed))

    @property
    def n(self) -> int:
        return math.prod(self.aspect_sizes)

    @property
    def capacity(self) -> int:
        """Number of edges available: ordered pairs, or twice the unordered pairs when reciprocal."""
        return self.n * (self.n - 1)

    @property
    def pairs_needed(self) -> int:
        return self.edge_count // 2 if self.reciprocal else self.edge_count

    @classmethod
    def parse_sizes(cls, text: str) -> Tuple[int, ...]:
        """Parse the CLI form ``"1000,10"``."""
        try:
            return tuple(int(tok) for tok in text.split(','))
        except ValueError:
            raise InvalidGenSpecError(f"Cannot parse aspect sizes '{text}', expected e.g. 1000,10") from None


def child_seed(seed: int, index: int) -> int:
    """Seed of ensemble member ``index`` derived from the run seed."""
    state = np.random.SeedSequence(int(seed), spawn_key=(int(index),)).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def floyd_sample(rng: np.random.Generator, population: int, k: int) -> np.ndarray:
    """``k`` distinct integers from ``[0, population)``, sorted."""
    if k > population:
        raise TooManyEdgesError(f"Cannot draw {k} distinct items from {population}")
    chosen = set()
    for j in range(population - k, population):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    return np.fromiter(sorted(chosen), dtype=np.int64, count=k)


def ordered_pair(k: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Decode ordered non-loop pair indices ``k in [0, n(n-1))``."""
    u, r = np.divmod(k, n - 1)
    v = np.where(r < u, r, r + 1)
    return u, v


def unordered_pair(k: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Decode unordered pair indices ``k in [0, n(n-1)/2)`` into ``u < v``."""
    u = np.empty_like(k)
    v = np.empty_like(k)
    for idx, kk in enumerate(k.tolist()):
        # largest u with u(2n-u-1)/2 <= kk
        disc = (2 * n - 1) ** 2 - 8 * kk
        uu = (2 * n - 1 - math.isqrt(disc)) // 2
        while uu * (2 * n - uu - 1) // 2 > kk:
            uu -= 1
        while (uu + 1) * (2 * n - uu - 2) // 2 <= kk:
            uu += 1
        u[idx] = uu
        v[idx] = kk - uu * (2 * n - uu - 1) // 2 + uu + 1
    return u, v


def _aspects(sizes: Sequence[int]) -> Tuple[Aspect, ...]:
    return tuple(Aspect(f"aspect{i}", tuple(str(e) for e in range(1, size + 1)))
                 for i, size in enumerate(sizes, start=1))


def random_mag(spec: GenSpec) -> MagGraph:
    """
    Draw one G(n, m) random MAG.

    With ``spec.reciprocal`` the ``m`` edges are ``m / 2`` unordered pairs,
    each materialized in both directions (``m`` must then be even).

    Raises
    ------
    TooManyEdgesError
        If ``m`` exceeds the ``n (n - 1)`` available directed edges.
    InvalidGenSpecError
        If ``m`` is odd while ``reciprocal`` is set.
    """
    n, m = spec.n, spec.edge_count
    if m > spec.capacity:
        raise TooManyEdgesError(
            f"Requested {m} edges but only {spec.capacity} non-loop edges exist for n={n}"
        )
    if spec.reciprocal and m % 2:
        raise InvalidGenSpecError(f"Reciprocal generation needs an even edge count, got {m}")

    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.reciprocal:
        keys = floyd_sample(rng, n * (n - 1) // 2, spec.pairs_needed)
        u, v = unordered_pair(keys, n)
        sources, targets = np.concatenate([u, v]), np.concatenate([v, u])
    else:
        keys = floyd_sample(rng, n * (n - 1), m)
        sources, targets = ordered_pair(keys, n)

    mag = mag_from_codes(_aspects(spec.aspect_sizes), sources, targets)
    logger.debug(f"Random MAG sizes={spec.aspect_sizes} n={n} m={mag.m} seed={spec.seed} "
                 f"reciprocal={spec.reciprocal}")
    return mag
