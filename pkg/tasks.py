import time

from celery_app import celery_app
from experiment import compute_instance
from logging_config import log_task_complete, log_task_failed, log_task_start, setup_logging

# Setup logging
logger = setup_logging(__name__)


@celery_app.task(bind=True)
def run_instance_task(self, manifest_payload, index):
    """
    Compute one ensemble instance on a worker.

    ``manifest_payload`` is ``ExperimentManifest.to_dict()``; the result is the
    JSON dict returned by ``experiment.compute_instance``.
    """
    task_id = self.request.id or f"local-{index}"
    name = manifest_payload.get('name', '?')
    log_task_start(logger, 'run_instance_task', task_id, experiment=name, index=index)
    self.update_state(
        state='PROGRESS',
        meta={
            'current_step': f'Instance {index} of {name}',
            'progress': 0,
            'status': 'Computing centralities'
        }
    )

    start_time = time.time()
    try:
        result = compute_instance(manifest_payload, index)
    except Exception as e:
        log_task_failed(logger, 'run_instance_task', task_id, e)
        self.update_state(
            state='FAILURE',
            meta={
                'status': f'Instance {index} failed: {e}',
                'exc_type': type(e).__name__,
                'exc_message': str(e)
            }
        )
        raise

    log_task_complete(logger, 'run_instance_task', task_id, time.time() - start_time)
    return result
