"""
Centralized configuration management for magcent.

This module provides a single source of truth for all application configuration,
including result paths, numerical tolerances of the matrix oracle, ranking
comparison defaults and task-queue settings.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class ConfigurationError(Exception):
    """Raised when configuration is invalid or missing required values."""
    pass


class Config:
    """Application configuration with validation and defaults."""

    # ========================================
    # Base Directories (absolute paths)
    # ========================================
    BASE_DIR = Path(__file__).parent.resolve()
    RESULTS_DIR = Path(os.getenv('MAG_RESULTS_DIR', BASE_DIR / 'results')).resolve()
    FIXTURES_DIR = BASE_DIR / 'fixtures'

    # ========================================
    # Celery/Redis Configuration
    # ========================================
    CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
    CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
    # Per-instance wait when an experiment is dispatched to workers
    INSTANCE_TIMEOUT = int(os.getenv('MAG_INSTANCE_TIMEOUT', 3600))

    # ========================================
    # Centrality Defaults
    # ========================================
    CLOSENESS_MODE = os.getenv('MAG_CLOSENESS', 'harmonic')
    DISTANCE_MODE = os.getenv('MAG_DISTANCE', 'faithful')
    # Brute-force path enumeration is exponential; oracle use only
    BRUTEFORCE_MAX_N = int(os.getenv('MAG_BRUTEFORCE_MAX_N', 14))

    # ========================================
    # Matrix Oracle
    # ========================================
    ORACLE_TOL = float(os.getenv('MAG_ORACLE_TOL', 1e-9))
    ORACLE_MAX_ITERS = int(os.getenv('MAG_ORACLE_MAX_ITERS', 1000))
    ORACLE_THRESHOLD = float(os.getenv('MAG_ORACLE_THRESHOLD', 1e-12))
    ORACLE_DENSE_LIMIT = int(os.getenv('MAG_ORACLE_DENSE_LIMIT', 512))

    # ========================================
    # Ranking Comparison
    # ========================================
    # 85% of the RBO weight on the top 10% of positions
    RBO_WEIGHT = float(os.getenv('MAG_RBO_WEIGHT', 0.85))
    RBO_DEPTH = float(os.getenv('MAG_RBO_DEPTH', 0.10))

    # ========================================
    # Logging Configuration
    # ========================================
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    # Empty string disables the rotating file handler
    LOG_FILE = os.getenv('LOG_FILE', str(BASE_DIR / 'logs' / 'magcent.log'))

    # ========================================
    # Class Methods
    # ========================================

    @classmethod
    def validate(cls) -> None:
        """
        Validate configuration and raise ConfigurationError if invalid.

        This method checks:
        - The results directory exists or can be created
        - Broker URLs are properly formatted
        - Numeric tolerances and limits are in range

        Raises:
            ConfigurationError: If configuration is invalid
        """
        errors = []

        try:
            cls.RESULTS_DIR.mkdir(parents=True, exist_ok=True)
        except Exception as e:
            errors.append(f"Failed to create results directory: {e}")

        for name in ('CELERY_BROKER_URL', 'CELERY_RESULT_BACKEND'):
            url = getattr(cls, name)
            if not url.startswith(('redis://', 'rediss://', 'memory://', 'cache+memory://')):
                errors.append(
                    f"Invalid {name}: {url}\n"
                    f"Expected format: redis://host:port/db"
                )

        if cls.CLOSENESS_MODE not in ('harmonic', 'classic'):
            errors.append(
                f"Invalid MAG_CLOSENESS: {cls.CLOSENESS_MODE}\n"
                f"Valid options: harmonic, classic"
            )

        if cls.DISTANCE_MODE not in ('faithful', 'exact'):
            errors.append(
                f"Invalid MAG_DISTANCE: {cls.DISTANCE_MODE}\n"
                f"Valid options: faithful, exact"
            )

        if not 0 < cls.RBO_WEIGHT < 1:
            errors.append(f"MAG_RBO_WEIGHT must be in (0, 1), got: {cls.RBO_WEIGHT}")

        if not 0 < cls.RBO_DEPTH <= 1:
            errors.append(f"MAG_RBO_DEPTH must be in (0, 1], got: {cls.RBO_DEPTH}")

        if not 0 < cls.ORACLE_TOL < 1:
            errors.append(f"MAG_ORACLE_TOL must be in (0, 1), got: {cls.ORACLE_TOL}")

        if cls.ORACLE_THRESHOLD <= 0:
            errors.append(f"MAG_ORACLE_THRESHOLD must be positive, got: {cls.ORACLE_THRESHOLD}")

        for name in ('ORACLE_MAX_ITERS', 'ORACLE_DENSE_LIMIT', 'BRUTEFORCE_MAX_N', 'INSTANCE_TIMEOUT'):
            if getattr(cls, name) <= 0:
                errors.append(f"{name} must be positive, got: {getattr(cls, name)}")

        valid_log_levels = {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}
        if cls.LOG_LEVEL.upper() not in valid_log_levels:
            errors.append(
                f"Invalid LOG_LEVEL: {cls.LOG_LEVEL}\n"
                f"Valid options: {', '.join(sorted(valid_log_levels))}"
            )

        # If there are errors, raise them all at once
        if errors:
            raise ConfigurationError(
                "Configuration validation failed:\n\n" +
                "\n\n".join(f"  • {error}" for error in errors)
            )

    @classmethod
    def get_results_path(cls, run_name: str) -> Path:
        """
        Generate results directory path for an experiment run.

        Args:
            run_name: Experiment name from the manifest

        Returns:
            Absolute path to results directory

        Example:
            >>> Config.get_results_path("tvg-betweenness")
            PosixPath('/app/results/tvg-betweenness')
        """
        results_path = cls.RESULTS_DIR / run_name
        results_path.mkdir(parents=True, exist_ok=True)
        return results_path

    @classmethod
    def get_status_file(cls, run_name: str) -> Path:
        """
        Get path to run status JSON file.

        Args:
            run_name: Experiment name from the manifest

        Returns:
            Path to status JSON file

        Example:
            >>> Config.get_status_file("tvg-betweenness")
            PosixPath('/app/results/tvg-betweenness_status.json')
        """
        return cls.RESULTS_DIR / f"{run_name}_status.json"

    @classmethod
    def as_dict(cls) -> dict:
        """Effective settings as plain values, in display order."""
        return {
            'BASE_DIR': str(cls.BASE_DIR),
            'RESULTS_DIR': str(cls.RESULTS_DIR),
            'CELERY_BROKER_URL': cls.CELERY_BROKER_URL,
            'CELERY_RESULT_BACKEND': cls.CELERY_RESULT_BACKEND,
            'INSTANCE_TIMEOUT': cls.INSTANCE_TIMEOUT,
            'CLOSENESS_MODE': cls.CLOSENESS_MODE,
            'DISTANCE_MODE': cls.DISTANCE_MODE,
            'BRUTEFORCE_MAX_N': cls.BRUTEFORCE_MAX_N,
            'ORACLE_TOL': cls.ORACLE_TOL,
            'ORACLE_MAX_ITERS': cls.ORACLE_MAX_ITERS,
            'ORACLE_THRESHOLD': cls.ORACLE_THRESHOLD,
            'ORACLE_DENSE_LIMIT': cls.ORACLE_DENSE_LIMIT,
            'RBO_WEIGHT': cls.RBO_WEIGHT,
            'RBO_DEPTH': cls.RBO_DEPTH,
            'LOG_LEVEL': cls.LOG_LEVEL,
            'LOG_FILE': cls.LOG_FILE or '(disabled)',
        }

    @classmethod
    def print_config(cls) -> None:
        """Print current configuration (useful for debugging)."""
        print("=" * 60)
        print("magcent Configuration")
        print("=" * 60)
        for key, value in cls.as_dict().items():
            print(f"{key + ':':<23}{value}")
        print("=" * 60)


# Validate configuration on module import
# This ensures errors are caught early during startup
try:
    Config.validate()
except ConfigurationError as e:
    print(f"\n{'='*60}")
    print("CONFIGURATION ERROR")
    print(f"{'='*60}")
    print(str(e))
    print(f"{'='*60}\n")
    raise
