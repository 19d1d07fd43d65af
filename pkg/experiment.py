"""
Ensemble experiments: naive aggregation versus sub-determined centrality.

For every instance of a manifest the runner generates (or loads) a MAG,
computes the chosen measures on the aggregated digraph and on the
sub-determined classes, ranks both score vectors and compares the rankings
with RBO/RBD. Per-instance rows are appended to ``instances.csv`` as they
complete; ``summary.csv`` reports Minimum / Maximum / Mean / Standard
Deviation of RBO and RBD per measure.

Instances run in-process (``local``) or as Celery tasks (``celery``).
"""

import json
import os
import time
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd
from tqdm import tqdm

from centrality import DISTANCES, CLOSENESS_MODES, compute_centrality
from config import Config
from generate import GenSpec, child_seed, random_mag
from logging_config import (
    log_exception,
    log_task_complete,
    log_task_start,
    setup_logging,
)
from mag_core import MagError
from mag_io import load_mag
from ranking import TIE_RULES, depth_for, rbo, persistence_for, to_ranking, top_k_table
from subdet import SubDetSpec, sub_companion_tuple

logger = setup_logging(__name__)

BACKENDS = ('local', 'celery')
STATISTICS = ('Minimum', 'Maximum', 'Mean', 'Standard Deviation')
INSTANCE_COLUMNS = ['instance', 'seed', 'source', 'n', 'm', 'n_zeta', 'measure',
                    'persistence', 'depth', 'rbo', 'rbd']
FAILURE_MARKER = 'FAILED'


class ManifestError(MagError):
    """Raised for missing or inconsistent experiment manifest fields."""
    pass


# ========================================
# Status file
# ========================================

def update_status_file(run_name: str, status: str, step: str = None, result_info: dict = None) -> None:
    """Update the run status JSON file on disk."""
    try:
        status_file = Config.get_status_file(run_name)
        current_status = {}
        if status_file.exists():
            try:
                current_status = json.loads(status_file.read_text())
            except json.JSONDecodeError:
                current_status = {}
        current_status['status'] = status
        if step:
            current_status['step'] = step
        if result_info:
            current_status['result_info'] = result_info
        current_status['last_updated'] = datetime.now().isoformat()
        status_file.write_text(json.dumps(current_status, indent=4))
        logger.debug(f"Status file updated: {status_file} -> {status}")
    except Exception as e:
        logger.warning(f"Failed to update status file for {run_name}: {e}")


# ========================================
# Manifest
# ========================================

@dataclass
class RboSettings:
    weight: float = Config.RBO_WEIGHT
    depth: float = Config.RBO_DEPTH
    truncate: Optional[int] = None
    ties: str = 'identifier'


@dataclass
class ExperimentManifest:
    """
    Everything needed to replay an ensemble run.

    Exactly one of ``generator`` (``aspect_sizes``, ``edge_count``,
    ``reciprocal``) and ``inputs`` (MAG file paths, one per instance) is set.
    Instance ``i`` of a generated ensemble uses ``child_seed(seed, i)``.
    """

    name: str
    zeta: List[int]
    generator: Optional[dict] = None
    inputs: Optional[List[str]] = None
    instances: int = 1
    seed: int = 0
    measures: List[str] = field(default_factory=lambda: ['betweenness', 'closeness'])
    distance: str = Config.DISTANCE_MODE
    closeness: str = Config.CLOSENESS_MODE
    rbo: RboSettings = field(default_factory=RboSettings)
    top_k: int = 10
    output_dir: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.rbo, dict):
            try:
                self.rbo = RboSettings(**self.rbo)
            except TypeError as e:
                raise ManifestError(f"Invalid rbo settings: {e}") from None
        self.validate()

    def validate(self) -> None:
        errors = []
        if not self.name or os.sep in self.name:
            errors.append(f"name must be a plain non-empty string, got '{self.name}'")
        if (self.generator is None) == (self.inputs is None):
            errors.append("exactly one of 'generator' and 'inputs' is required")
        if self.generator is not None:
            missing = {'aspect_sizes', 'edge_count'} - set(self.generator)
            if missing:
                errors.append(f"generator lacks {', '.join(sorted(missing))}")
            if self.instances < 1:
                errors.append(f"instances must be positive, got {self.instances}")
        if self.inputs is not None:
            if not self.inputs:
                errors.append("inputs must list at least one MAG file")
            self.instances = len(self.inputs)
        bad = [m for m in self.measures if m not in ('betweenness', 'closeness')]
        if not self.measures or bad:
            errors.append(f"measures must be betweenness and/or closeness, got {self.measures}")
        if self.distance not in DISTANCES:
            errors.append(f"distance must be one of {DISTANCES}, got '{self.distance}'")
        if self.closeness not in CLOSENESS_MODES:
            errors.append(f"closeness must be one of {CLOSENESS_MODES}, got '{self.closeness}'")
        if self.rbo.ties not in TIE_RULES:
            errors.append(f"rbo.ties must be one of {TIE_RULES}, got '{self.rbo.ties}'")
        if not 0 < self.rbo.weight < 1 or not 0 < self.rbo.depth <= 1:
            errors.append(f"rbo weight must be in (0, 1) and depth in (0, 1], got {self.rbo}")
        if errors:
            raise ManifestError("Invalid manifest:\n" + "\n".join(f"  • {e}" for e in errors))

    @classmethod
    def from_dict(cls, data: dict) -> 'ExperimentManifest':
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ManifestError(f"Unknown manifest field(s): {', '.join(sorted(unknown))}")
        for required in ('name', 'zeta'):
            if required not in data:
                raise ManifestError(f"Manifest lacks required field '{required}'")
        return cls(**data)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> 'ExperimentManifest':
        try:
            data = json.loads(Path(path).read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ManifestError(f"{path}: not valid JSON ({e})") from None
        manifest = cls.from_dict(data)
        if manifest.inputs:
            base = Path(path).parent
            manifest.inputs = [str(p if Path(p).is_absolute() else base / p) for p in manifest.inputs]
        return manifest

    def to_dict(self) -> dict:
        return asdict(self)

    def results_path(self) -> Path:
        if self.output_dir:
            path = Path(self.output_dir)
            path.mkdir(parents=True, exist_ok=True)
            return path
        return Config.get_results_path(self.name)


@dataclass
class ExperimentReport:
    instances: pd.DataFrame
    summary: pd.DataFrame
    top_k: pd.DataFrame
    output_dir: Path


# ========================================
# One instance
# ========================================

def compute_instance(manifest: Union[ExperimentManifest, dict], index: int) -> dict:
    """
    Generate or load instance ``index`` and compare both modes on every measure.

    Returns a JSON-serializable dict (it is also the Celery task result) with
    ``rows`` for ``instances.csv`` and ``top_k`` records.
    """
    if isinstance(manifest, dict):
        manifest = ExperimentManifest.from_dict(manifest)

    if manifest.generator is not None:
        seed = child_seed(manifest.seed, index)
        spec = GenSpec(tuple(manifest.generator['aspect_sizes']), manifest.generator['edge_count'],
                       seed=seed, reciprocal=bool(manifest.generator.get('reciprocal', False)))
        mag = random_mag(spec)
        source = 'generated'
    else:
        seed = None
        source = manifest.inputs[index]
        mag = load_mag(source)

    zeta = SubDetSpec.coerce(manifest.zeta, mag.p)
    n_zeta = sub_companion_tuple(mag.tau, zeta).n
    depth = depth_for(manifest.rbo.depth, n_zeta)
    p = persistence_for(n_zeta, manifest.rbo.weight, manifest.rbo.depth)

    rows, top = [], []
    for measure in manifest.measures:
        naive = compute_centrality(mag, measure, 'naive-aggregate', zeta, closeness=manifest.closeness)
        subdet = compute_centrality(mag, measure, 'subdet', zeta, distance=manifest.distance,
                                    closeness=manifest.closeness)
        labels = naive.labels()
        a = to_ranking(naive, manifest.rbo.ties, items=labels)
        b = to_ranking(subdet, manifest.rbo.ties, items=labels)
        similarity = rbo(a, b, p, truncate=manifest.rbo.truncate)
        rows.append({
            'instance': index,
            'seed': seed,
            'source': source,
            'n': mag.n,
            'm': mag.m,
            'n_zeta': n_zeta,
            'measure': measure,
            'persistence': p,
            'depth': depth,
            'rbo': similarity,
            'rbd': 1.0 - similarity,
        })
        table = top_k_table(a, b, manifest.top_k)
        table.insert(0, 'measure', measure)
        table.insert(0, 'instance', index)
        top.extend(table.to_dict(orient='records'))
    return {'index': index, 'rows': rows, 'top_k': top}


def summarize(instances: pd.DataFrame) -> pd.DataFrame:
    """Minimum / Maximum / Mean / Standard Deviation of RBO and RBD per measure."""
    records = []
    for measure, group in instances.groupby('measure', sort=False):
        stats = {
            'Minimum': group[['rbo', 'rbd']].min(),
            'Maximum': group[['rbo', 'rbd']].max(),
            'Mean': group[['rbo', 'rbd']].mean(),
            'Standard Deviation': group[['rbo', 'rbd']].std(ddof=0),
        }
        for statistic in STATISTICS:
            records.append({'measure': measure, 'statistic': statistic,
                            'RBO': float(stats[statistic]['rbo']),
                            'RBD': float(stats[statistic]['rbd'])})
    return pd.DataFrame(records, columns=['measure', 'statistic', 'RBO', 'RBD'])


# ========================================
# Runner
# ========================================

def _local_results(manifest: ExperimentManifest, progress: bool):
    for index in tqdm(range(manifest.instances), desc=manifest.name, unit='instance',
                      disable=not progress):
        yield compute_instance(manifest, index)


def _celery_results(manifest: ExperimentManifest):
    from celery import group

    from celery_app import celery_app
    from health import health_check
    from tasks import run_instance_task

    if not celery_app.conf.task_always_eager:
        health = health_check()
        if health['status'] != 'healthy':
            raise MagError(f"Celery backend unavailable: {health['components']}")
    payload = manifest.to_dict()
    job = group(run_instance_task.s(payload, index) for index in range(manifest.instances)).apply_async()
    for async_result in job.results:
        yield async_result.get(timeout=Config.INSTANCE_TIMEOUT)


def run_experiment(manifest: ExperimentManifest, backend: str = 'local',
                   progress: bool = False) -> ExperimentReport:
    """
    Run every instance of ``manifest`` and write the result tables.

    Parameters
    ----------
    manifest : ExperimentManifest
    backend : {'local', 'celery'}
        ``celery`` dispatches one task per instance and checks broker and
        worker health first.
    progress : bool
        tqdm progress bar for the local backend.

    Returns
    -------
    ExperimentReport

    Raises
    ------
    MagError
        Propagated from any instance. Rows already computed stay in
        ``instances.csv`` and a ``FAILED`` marker holds the error.
    """
    if backend not in BACKENDS:
        raise ValueError(f"Unknown backend '{backend}', expected one of {BACKENDS}")
    out = manifest.results_path()
    instances_csv, summary_csv, topk_csv = out / 'instances.csv', out / 'summary.csv', out / 'topk.csv'
    for stale in (instances_csv, summary_csv, topk_csv, out / FAILURE_MARKER):
        if stale.exists():
            stale.unlink()
    (out / 'manifest.json').write_text(json.dumps(manifest.to_dict(), indent=2))

    run_id = uuid.uuid4().hex[:12]
    log_task_start(logger, 'run_experiment', run_id, name=manifest.name, backend=backend,
                   instances=manifest.instances)
    update_status_file(manifest.name, 'running', step=f'0/{manifest.instances} instances')
    start = time.time()

    rows, top = [], []
    try:
        results = _local_results(manifest, progress) if backend == 'local' else _celery_results(manifest)
        for done, result in enumerate(results, start=1):
            frame = pd.DataFrame(result['rows'], columns=INSTANCE_COLUMNS)
            frame.to_csv(instances_csv, mode='a', header=not instances_csv.exists(), index=False,
                         float_format='%.12g')
            rows.extend(result['rows'])
            top.extend(result['top_k'])
            update_status_file(manifest.name, 'running', step=f'{done}/{manifest.instances} instances')
    except Exception as e:
        (out / FAILURE_MARKER).write_text(f"{type(e).__name__}: {e}\n")
        update_status_file(manifest.name, 'failed', result_info={'error': str(e),
                                                                 'completed_instances': len(rows)})
        log_exception(logger, e, f"Experiment '{manifest.name}' failed")
        raise

    instances = pd.DataFrame(rows, columns=INSTANCE_COLUMNS)
    summary = summarize(instances)
    summary.to_csv(summary_csv, index=False, float_format='%.12g')
    top_frame = pd.DataFrame(top)
    top_frame.to_csv(topk_csv, index=False)

    duration = time.time() - start
    update_status_file(manifest.name, 'completed', step=f'{manifest.instances}/{manifest.instances} instances',
                       result_info={'output_dir': str(out), 'duration_s': round(duration, 2)})
    log_task_complete(logger, 'run_experiment', run_id, duration)
    return ExperimentReport(instances=instances, summary=summary, top_k=top_frame, output_dir=out)
