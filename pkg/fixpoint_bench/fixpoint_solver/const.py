"""Constants of the fixed point solver."""

import math


# Geometry --->

CURVATURE = -4.0

BOUNDARY_EPS = 1e-10

# C^i = {x : ||x|| <= 1 - 1e-5}, expressed as a geodesic radius.
TARGET_RADIUS = math.atanh(1.0 - 1e-5)

# Rate engines --->

RATE_EPS = 1e-8

V_INIT = RATE_EPS ** 2

DEFAULT_BAR_BETA = 0.999

# Problem sampling --->

WITNESS_RADIUS = 0.5

CENTER_SPREAD = 0.4

CONSISTENT_SLACK = (0.05, 0.5)

INCONSISTENT_CENTER_RADIUS = 0.5

INCONSISTENT_SEPARATION = (1.0, 1.5)

INCONSISTENT_MARGIN = 0.1

MIN_RADIUS = 0.1

START_RADIUS = 0.8
