import logging

from logging_config import APP_LOGGER, setup_logging


def test_module_loggers_are_children_of_the_app_logger():
    logger = setup_logging('centrality')
    assert logger.name == 'magcent.centrality'
    assert logger.parent is logging.getLogger(APP_LOGGER)
    assert logger.propagate


def test_qualified_names_are_kept():
    assert setup_logging('magcent.subdet').name == 'magcent.subdet'
    assert setup_logging().name == APP_LOGGER


def test_handlers_live_on_the_app_logger_only():
    for name in ('generate', 'ranking', 'mag_core'):
        assert setup_logging(name).handlers == []
    assert logging.getLogger(APP_LOGGER).handlers


def test_repeated_setup_adds_no_handlers():
    before = list(setup_logging().handlers)
    for _ in range(3):
        setup_logging('experiment')
        setup_logging()
    assert setup_logging().handlers == before


def test_child_records_reach_the_app_logger():
    app_logger = setup_logging()
    seen = []

    class Collect(logging.Handler):
        def emit(self, record):
            seen.append(record)

    handler = Collect(level=logging.WARNING)
    app_logger.addHandler(handler)
    try:
        setup_logging('tasks').warning("instance 3 failed")
    finally:
        app_logger.removeHandler(handler)
    assert [(r.name, r.getMessage()) for r in seen] == [('magcent.tasks', "instance 3 failed")]
