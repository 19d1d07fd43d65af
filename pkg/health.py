"""
Health checks for the distributed experiment backend.

This module provides health check functions for:
- Redis broker connectivity
- Celery worker availability
- Writability of the results directory

``run_experiment(backend='celery')`` and ``mag health`` call ``health_check``
before dispatching work.
"""

import os
import time
from datetime import datetime
from typing import Any, Dict

import redis

from celery_app import celery_app
from config import Config
from logging_config import setup_logging

logger = setup_logging(__name__)


def check_redis() -> Dict[str, Any]:
    """
    Check Redis broker connectivity.

    Returns:
        Dictionary with status and message:
        - status: 'healthy' or 'unhealthy'
        - message: Description of the status
        - response_time_ms: Response time in milliseconds (if healthy)
    """
    if not Config.CELERY_BROKER_URL.startswith(('redis://', 'rediss://')):
        return {
            'status': 'healthy',
            'message': f'Non-Redis broker {Config.CELERY_BROKER_URL.split(":", 1)[0]}, nothing to ping'
        }
    try:
        r = redis.from_url(Config.CELERY_BROKER_URL, socket_connect_timeout=2)
        start = time.time()
        r.ping()
        response_time = (time.time() - start) * 1000

        return {
            'status': 'healthy',
            'message': 'Redis accessible',
            'response_time_ms': round(response_time, 2)
        }
    except redis.ConnectionError as e:
        logger.error(f"Redis connection error: {e}")
        return {
            'status': 'unhealthy',
            'message': f'Redis connection failed: {e}'
        }
    except Exception as e:
        logger.error(f"Redis health check error: {e}")
        return {
            'status': 'unhealthy',
            'message': f'Redis error: {e}'
        }


def check_celery() -> Dict[str, Any]:
    """
    Check Celery worker availability.

    Returns:
        Dictionary with status and worker information:
        - status: 'healthy' or 'unhealthy'
        - workers: Number of responding workers
        - worker_names: Names of responding workers (if healthy)
    """
    try:
        inspector = celery_app.control.inspect(timeout=2.0)
        replies = inspector.ping()

        if replies:
            return {
                'status': 'healthy',
                'message': f'{len(replies)} worker(s) responding',
                'workers': len(replies),
                'worker_names': sorted(replies)
            }
        logger.warning("No Celery workers responded")
        return {
            'status': 'unhealthy',
            'message': 'No workers responding',
            'workers': 0
        }
    except Exception as e:
        logger.error(f"Celery health check error: {e}")
        return {
            'status': 'unhealthy',
            'message': f'Celery inspection failed: {e}',
            'workers': 0
        }


def check_results_dir() -> Dict[str, Any]:
    """Workers and the runner both write under RESULTS_DIR; check it accepts files."""
    probe = Config.RESULTS_DIR / f".health-{os.getpid()}"
    try:
        Config.RESULTS_DIR.mkdir(parents=True, exist_ok=True)
        probe.write_text("ok")
        probe.unlink()
    except OSError as e:
        logger.error(f"Results directory not writable: {e}")
        return {'status': 'unhealthy', 'message': f'{Config.RESULTS_DIR} not writable: {e}'}
    return {'status': 'healthy', 'message': f'{Config.RESULTS_DIR} writable'}


def health_check() -> Dict[str, Any]:
    """
    Health of the broker and the worker pool.

    Returns:
        Dictionary with overall status ('healthy' only if every component is),
        an ISO timestamp and the per-component results.
    """
    redis_health = check_redis()
    # Workers cannot answer without a broker
    if redis_health['status'] == 'healthy':
        celery_health = check_celery()
    else:
        celery_health = {'status': 'unhealthy', 'message': 'Skipped: broker unreachable', 'workers': 0}

    results_health = check_results_dir()

    overall_healthy = all(c['status'] == 'healthy' for c in (redis_health, celery_health, results_health))
    result = {
        'status': 'healthy' if overall_healthy else 'unhealthy',
        'timestamp': datetime.now().isoformat(),
        'components': {
            'redis': redis_health,
            'celery': celery_health,
            'results': results_health
        }
    }

    if overall_healthy:
        logger.info("Health check passed")
    else:
        logger.warning(f"Health check failed: {result['components']}")
    return result
