import pytest

import health
from config import Config
from tasks import run_instance_task


def payload(**overrides):
    data = {
        'name': 'task-run',
        'generator': {'aspect_sizes': [5, 2], 'edge_count': 12},
        'instances': 2,
        'seed': 3,
        'zeta': [1, 0],
        'measures': ['betweenness'],
    }
    data.update(overrides)
    return data


class TestRunInstanceTask:

    def test_eager_result_has_rows(self):
        result = run_instance_task.apply(args=(payload(), 1)).get()
        assert result['index'] == 1
        assert result['rows'][0]['measure'] == 'betweenness'
        assert result['rows'][0]['n_zeta'] == 5

    def test_failure_propagates(self):
        outcome = run_instance_task.apply(args=(payload(zeta=[1, 1]), 0))
        assert outcome.failed()
        with pytest.raises(Exception):
            outcome.get()


class TestHealth:

    def test_non_redis_broker_needs_no_ping(self):
        assert Config.CELERY_BROKER_URL.startswith('memory://')
        assert health.check_redis()['status'] == 'healthy'

    def test_unhealthy_when_no_workers(self, monkeypatch):
        monkeypatch.setattr(health, 'check_redis', lambda: {'status': 'healthy', 'message': 'ok'})
        monkeypatch.setattr(health, 'check_celery', lambda: {'status': 'unhealthy', 'workers': 0})
        result = health.health_check()
        assert result['status'] == 'unhealthy'
        assert result['components']['celery']['workers'] == 0

    def test_workers_skipped_without_broker(self, monkeypatch):
        monkeypatch.setattr(health, 'check_redis', lambda: {'status': 'unhealthy', 'message': 'down'})
        monkeypatch.setattr(health, 'check_celery', lambda: pytest.fail('workers checked without broker'))
        result = health.health_check()
        assert result['components']['celery']['message'].startswith('Skipped')

    def test_healthy(self, monkeypatch):
        monkeypatch.setattr(health, 'check_redis', lambda: {'status': 'healthy'})
        monkeypatch.setattr(health, 'check_celery', lambda: {'status': 'healthy', 'workers': 2})
        assert health.health_check()['status'] == 'healthy'

    def test_results_dir_writable(self, results_dir):
        assert health.check_results_dir()['status'] == 'healthy'
        assert not list(results_dir.glob('.health-*'))

    def test_results_dir_blocked_by_file(self, tmp_path, monkeypatch):
        blocker = tmp_path / 'results'
        blocker.write_text('not a directory')
        monkeypatch.setattr(Config, 'RESULTS_DIR', blocker)
        monkeypatch.setattr(health, 'check_redis', lambda: {'status': 'healthy'})
        monkeypatch.setattr(health, 'check_celery', lambda: {'status': 'healthy', 'workers': 1})
        result = health.health_check()
        assert result['status'] == 'unhealthy'
        assert result['components']['results']['status'] == 'unhealthy'
