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

"""Planner module."""

from steerneedle.environment.scenario import ProblemInstance
from steerneedle.planner.config import PlannerConfig, Variant
from steerneedle.planner.parallel import plan_parallel
from steerneedle.planner.result import (
    PlanResult,
    PlanStats,
    PlanStatus,
    Trajectory,
    load_plan,
    save_plan,
)
from steerneedle.planner.search import (
    ClosedSet,
    OpenQueue,
    RejectReason,
    SearchNode,
    exists_similar,
    insert_refined,
    plan_serial,
    retrieve_plan,
    validate_node,
)


def plan(problem: ProblemInstance, cfg: PlannerConfig = PlannerConfig()) -> PlanResult:
    """Solves `problem` with the variant selected by `cfg`.

    Only the parallel variant uses more than one thread.
    """
    if cfg.variant.parallel:
        return plan_parallel(problem, cfg)
    return plan_serial(problem, cfg)


__all__ = [
    "ClosedSet",
    "OpenQueue",
    "PlanResult",
    "PlanStats",
    "PlanStatus",
    "PlannerConfig",
    "RejectReason",
    "SearchNode",
    "Trajectory",
    "Variant",
    "exists_similar",
    "insert_refined",
    "load_plan",
    "plan",
    "plan_parallel",
    "plan_serial",
    "retrieve_plan",
    "save_plan",
    "validate_node",
]
