"""__init__.py file."""

from .config import RunConfig  # noqa
from .coordinator import ExperimentCoordinator, run_experiment  # noqa
