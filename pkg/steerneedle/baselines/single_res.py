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

"""Best-first search restricted to the finest primitive resolution."""

from dataclasses import replace
from typing import List

from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry.pose import apply_primitive
from steerneedle.planner.config import PlannerConfig, Variant
from steerneedle.planner.result import PlanResult
from steerneedle.planner.search import MultiResolutionSearch, SearchNode
from steerneedle.primitives import hierarchy
from steerneedle.primitives.motion_primitive import MotionPrimitive


class SingleResolutionSearch(MultiResolutionSearch):
    """Expands every accepted node with the whole finest primitive set.

    Nodes are served by accumulated length, then insertion order. Nothing is
    refined. Goal reachability, direct goal connection and similar-node rejection
    stay enabled.
    """

    def __init__(self, problem: ProblemInstance, cfg: PlannerConfig) -> None:
        super().__init__(problem, replace(cfg, variant=Variant.RCS, thread_count=1))

    @property
    def name(self) -> str:
        return "single-res"

    def _priority(self, node: SearchNode) -> float:
        return node.accumulated_length

    def expansion_primitives(self) -> List[MotionPrimitive]:
        return hierarchy.finest_set(self.cfg.cutoff, (0.0, self.problem.kappa_max))

    def refine(self, node: SearchNode) -> int:
        return 0

    def expand(self, node: SearchNode) -> None:
        # Finest-set lengths need not lie on the dyadic grid, so rank is plain depth.
        for m in self._primitives:
            self.open.push(
                SearchNode(
                    pose=apply_primitive(node.pose, m),
                    parent=node,
                    primitive=m,
                    rank=node.rank + 1,
                    accumulated_length=node.accumulated_length + m.delta_ell,
                )
            )


def plan_single_res(
    problem: ProblemInstance, cfg: PlannerConfig = PlannerConfig()
) -> PlanResult:
    return SingleResolutionSearch(problem, cfg).run()
