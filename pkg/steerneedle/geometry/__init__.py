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

"""Geometry module."""

from steerneedle.geometry.pose import (
    Arc,
    Pose,
    apply_primitive,
    arc_positions,
    distance,
    interpolate_arc,
)
from steerneedle.geometry.reachability import (
    UndefinedDirectionError,
    curvature_to_point,
    direct_connect,
    goal_reachable,
)

__all__ = [
    "Arc",
    "Pose",
    "UndefinedDirectionError",
    "apply_primitive",
    "arc_positions",
    "curvature_to_point",
    "direct_connect",
    "distance",
    "goal_reachable",
    "interpolate_arc",
]
