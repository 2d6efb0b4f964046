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

"""Primitives module."""

from steerneedle.primitives.approximation import (
    DSimBound,
    action_distance,
    d_sim_bound,
    deviation_bound,
    duty_cycle_decompose,
)
from steerneedle.primitives.hierarchy import (
    NoLevelError,
    angle_level,
    below_cutoff,
    coarsest_primitives,
    finest_set,
    length_level,
    primitive_id,
    rank,
    refine,
)
from steerneedle.primitives.motion_primitive import MotionPrimitive, Resolution

__all__ = [
    "DSimBound",
    "MotionPrimitive",
    "NoLevelError",
    "Resolution",
    "action_distance",
    "angle_level",
    "below_cutoff",
    "coarsest_primitives",
    "d_sim_bound",
    "deviation_bound",
    "duty_cycle_decompose",
    "finest_set",
    "length_level",
    "primitive_id",
    "rank",
    "refine",
]
