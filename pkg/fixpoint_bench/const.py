"""Constants of the benchmark application."""

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_INTEGRITY_ERROR = 4

RAW_CSV_HEADER = (
    "algorithm", "sampling", "seed", "n", "D_contrib", "f_value", "clamps",
)

AGGREGATED_CSV_HEADER = ("algorithm", "n", "D_n", "F_n")

RAW_CSV_NAME = "runs.csv"
AGGREGATED_CSV_NAME = "aggregated.csv"
SUMMARY_NAME = "summary.json"
BOUNDS_NAME = "bounds.json"
SVG_NAMES = {
    "D_n": "convergence_D.svg",
    "F_n": "convergence_F.svg",
}

# default iteration count by maximal disk dimension
DEFAULT_ITERATIONS = ((2, 500), (10, 1000))
LARGE_DIM_ITERATIONS = 1500

DEFAULT_SAMPLINGS = 10
DEFAULT_BALLS = {"consistent": 5, "inconsistent": 2}

CLAMP_STORM_RATIO = 0.01

# seed stream tags
STREAM_SYSTEM = 0
STREAM_START = 1
STREAM_INDICES = 2

# bound diagnostics
CONSTANT_INFLATION = 1.5
SVG_LOG_FLOOR = 1e-16
