"""Models of optimizer states and run records."""

from .state import OptimizerState, StepReport
from .record import RunRecord, RunRow, StepDiagnostics
