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

"""Comparison planners."""

from steerneedle.baselines.rrt import RrtConfig, plan_rrt, plan_rrt_parallel
from steerneedle.baselines.single_res import SingleResolutionSearch, plan_single_res

__all__ = [
    "RrtConfig",
    "SingleResolutionSearch",
    "plan_rrt",
    "plan_rrt_parallel",
    "plan_single_res",
]
