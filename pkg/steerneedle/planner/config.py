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

"""Planner configuration."""

import enum
from dataclasses import dataclass, field
from typing import Optional

from steerneedle import constants as consts
from steerneedle.primitives.motion_primitive import Resolution


class Variant(enum.Enum):
    """Feature sets of the multi-resolution search."""

    RCS_B = "rcs-b"
    RCS_NR = "rcs-nr"
    RCS = "rcs"
    RCS_PAR = "rcs-par"

    @property
    def rejects_similar(self) -> bool:
        return self is not Variant.RCS_NR

    @property
    def optimized(self) -> bool:
        """Reachability pruning, direct goal connection and equivalent-node pruning."""
        return self in (Variant.RCS, Variant.RCS_PAR)

    @property
    def parallel(self) -> bool:
        return self is Variant.RCS_PAR


def _default_cutoff() -> Resolution:
    return Resolution(consts.CUTOFF_ELL, consts.CUTOFF_THETA)


@dataclass(frozen=True)
class PlannerConfig:
    """Parameters of one planner run.

    Attributes:
        delta_ell_max: Length of the coarsest primitives, in mm.
        delta_theta_max: Angle step of the coarsest curving planes, in rad.
        cutoff: Finest length and angle grid steps that are still refined.
        d_sim: Radius under the pose metric within which configurations are similar.
        alpha: Weight of the angular term of the pose metric, in mm/rad.
        collision_step: Arc sampling step for collision checks, in mm.
        variant: Feature set to run.
        thread_count: Number of worker threads; only the parallel variant uses more
            than one.
        time_budget: Wall-clock budget in seconds.
        rng_seed: Seed recorded with the run. The search itself is deterministic.
        keep_improving: Keep searching after the first solution and return the
            cheapest one found within the budget.
        max_expansions: Optional cap on extracted nodes, reported as a timeout.
    """

    delta_ell_max: float = consts.DELTA_ELL_MAX
    delta_theta_max: float = consts.DELTA_THETA_MAX
    cutoff: Resolution = field(default_factory=_default_cutoff)
    d_sim: float = consts.D_SIM
    alpha: float = consts.ALPHA
    collision_step: float = consts.COLLISION_STEP
    variant: Variant = Variant.RCS
    thread_count: int = 1
    time_budget: float = consts.TIME_BUDGET
    rng_seed: int = 0
    keep_improving: bool = False
    max_expansions: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("delta_ell_max", "delta_theta_max", "collision_step", "alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")
        if self.d_sim < 0:
            raise ValueError(f"d_sim must be non-negative, got {self.d_sim}.")
        if self.thread_count < 1:
            raise ValueError(f"thread_count must be >= 1, got {self.thread_count}.")
        if not self.time_budget > 0:
            raise ValueError(f"time_budget must be positive, got {self.time_budget}.")
        if self.max_expansions is not None and self.max_expansions < 1:
            raise ValueError("max_expansions must be positive when given.")
        if self.cutoff.ell > self.delta_ell_max:
            raise ValueError("cutoff.ell must not exceed delta_ell_max.")
        if self.cutoff.theta > self.delta_theta_max:
            raise ValueError("cutoff.theta must not exceed delta_theta_max.")
