"""Basic constants."""

import os
from pathlib import Path

# standard for all hsr projects, but individual set
PROJECT_NAME = "qos"
ORGANIZATION = "hsr"
LIBRARY_NAME = f"{ORGANIZATION}_{PROJECT_NAME}"
HOME = str(Path.home())
HSR_FOLDER = os.path.join(HOME, f".{ORGANIZATION}")
PROJECT_FOLDER = os.path.join(HSR_FOLDER, PROJECT_NAME)
OUTPUT_FOLDER = os.path.join(PROJECT_FOLDER, "output")

# environment variables
SCENARIO_ENV = "HSR_QOS_SCENARIO"
OUTPUT_ENV = "HSR_QOS_OUTPUT"

# numbers
MBPS = 1e6
DEFAULT_SEPARATE_SPLITS = 200
DEFAULT_REGION_POINTS = 50
MAX_BISECTION_STEPS = 200
ALGORITHM1_MAX_ITERATIONS = 10000
# stopping threshold of the multiplicative update schedule, 0.001 Mbps
ALGORITHM1_RATE_THRESHOLD = 0.001 * MBPS

# (r_di, r_ds) rows of the minimum-power table, Mbps
REFERENCE_DEMANDS_MBPS: tuple[tuple[float, float], ...] = (
    (20.0, 0.0),
    (15.0, 5.0),
    (10.0, 10.0),
    (5.0, 15.0),
    (0.0, 20.0),
)
WORST_CASE_RATIOS: tuple[float, ...] = (0.0, 0.02, 0.05)
MARGIN_RATIOS: tuple[float, ...] = (
    0.0,
    0.025,
    0.05,
    0.075,
    0.1,
    0.125,
    0.15,
    0.175,
    0.2,
)

# artifact formatting
FLOAT_FORMAT = "%.6g"
LINE_TERMINATOR = "\n"
MANIFEST_SUFFIX = ".manifest.json"
