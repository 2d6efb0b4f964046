# Copyright 2024 The SteerNeedle Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Planner and scenario constants."""

import math

# Needle and experiment geometry. Lengths are in mm, curvatures in 1/mm.
KAPPA_MAX = 0.01
ELL_MAX = 100.0
TAU = 1.0
NEEDLE_DIAMETER = 2.0
NEEDLE_RADIUS = NEEDLE_DIAMETER / 2
COLLISION_STEP = 0.5

# Coarsest primitive length and curving-plane angle.
DELTA_ELL_MAX = 20.0
DELTA_THETA_MAX = math.pi / 2

# Cutoff resolution. The length is 5 mm/s insertion over a 25 ms control period and
# the angle is 2*pi rad/s rotation over the same period.
CUTOFF_ELL = 0.125
CUTOFF_THETA = 0.157

# Weight of the angular term in the configuration metric, in mm/rad.
ALPHA = 0.05

# Radius under which two configurations are considered similar.
D_SIM = 5.5e-5

# Wall-clock budget for a single planning query, in seconds.
TIME_BUDGET = 100.0

# Curvature set used by the search.
CURVATURES = (0.0, KAPPA_MAX)

# Workspace-sampling RRT.
GOAL_BIAS = 0.05
DIRECT_CONNECT_RATIO = 1.0
MAX_EXTEND = DELTA_ELL_MAX

# Arc-length step used when densely sampling trajectories for Hausdorff distances.
HAUSDORFF_STEP = 0.1

# Synthetic anatomy generation.
BOX_SIZE = 100.0
POINT_SPACING = 1.0
N_VESSELS = 12
VESSEL_RADIUS_RANGE = (2.0, 6.0)
SEGMENTS_PER_VESSEL = 4

# Test-case generation draws at most this many candidates per requested case.
MAX_DRAWS_PER_CASE = 100

# Goal draws tried for one start before it is discarded.
MAX_GOAL_DRAWS_PER_START = 200
