"""Shared fixtures: fixture MAGs, seeded random MAG factories and an isolated results directory."""

import os
import tempfile

# Configure before any project module reads the environment
os.environ['LOG_FILE'] = ''
os.environ['LOG_LEVEL'] = 'WARNING'
os.environ['CELERY_BROKER_URL'] = 'memory://'
os.environ['CELERY_RESULT_BACKEND'] = 'cache+memory://'
os.environ.setdefault('MAG_RESULTS_DIR', tempfile.mkdtemp(prefix='magcent-results-'))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from config import Config  # noqa: E402
from generate import GenSpec, random_mag  # noqa: E402
from mag_io import load_mag  # noqa: E402

FIXTURES = Config.FIXTURES_DIR


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def mag_r():
    """Three vertices at two instants; aggregating time creates the spurious path 1 -> 2 -> 3."""
    return load_mag(FIXTURES / 'mag_r.mag')


@pytest.fixture
def tvg4():
    """Four vertices at three instants; 1 reaches 4 only after aggregation."""
    return load_mag(FIXTURES / 'tvg4.mag')


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    """Point Config.RESULTS_DIR at a per-test directory."""
    monkeypatch.setattr(Config, 'RESULTS_DIR', tmp_path)
    return tmp_path


def random_mags(count, seed, sizes_choices, density=(0.05, 0.3)):
    """Seeded stream of ``(sizes, mag)`` pairs with density in the given range."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        sizes = sizes_choices[int(rng.integers(len(sizes_choices)))]
        n = int(np.prod(sizes))
        m = max(1, int(round(float(rng.uniform(*density)) * n * (n - 1))))
        yield sizes, random_mag(GenSpec(sizes, m, seed=int(rng.integers(2 ** 32))))


@pytest.fixture
def mag_factory():
    return random_mags
