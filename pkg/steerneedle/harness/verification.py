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

"""Independent re-check of a returned trajectory against its problem."""

from dataclasses import dataclass
from typing import List, NamedTuple, Union

import numpy as np

from steerneedle import constants as consts
from steerneedle.environment.environment import arc_free
from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry import transformations as tr
from steerneedle.geometry.pose import apply_primitive
from steerneedle.planner.result import PlanResult, Trajectory

_CURVATURE_TOL = 1e-12
_CONSISTENCY_TOL = 1e-6
_LENGTH_TOL = 1e-9
_TARGET_TOL = 1e-9
_START_TOL = 1e-9

CHECK_NAMES = (
    "start",
    "curvature",
    "consistency",
    "collision",
    "length",
    "targeting",
)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def check(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(f"No check named {name!r}. Available: {list(CHECK_NAMES)}.")


def verify_trajectory(
    plan: Union[PlanResult, Trajectory],
    problem: ProblemInstance,
    collision_step: float = consts.COLLISION_STEP,
) -> VerificationReport:
    """Re-simulates the primitives from the start pose and re-checks every condition.

    Args:
        plan: A solved plan, or its trajectory.
        problem: The instance the plan claims to solve.
        collision_step: Arc sampling step for the collision re-check, in mm.

    Returns:
        One pass/fail entry per check in `CHECK_NAMES`. Collision, length and
        targeting are evaluated on the re-simulated poses, not the stored waypoints.

    Raises:
        ValueError: if `plan` carries no trajectory.
    """
    trajectory = plan.trajectory if isinstance(plan, PlanResult) else plan
    if trajectory is None:
        raise ValueError("Only plans with a trajectory can be verified.")

    checks = []
    first = trajectory.waypoints[0]
    start_error = float(
        max(
            np.linalg.norm(first.position - problem.start.position),
            tr.quat_angle_between(first.orientation, problem.start.orientation),
        )
    )
    checks.append(
        CheckResult("start", start_error <= _START_TOL, f"offset {start_error:.3g}")
    )

    sharpest = max((m.kappa for m in trajectory.primitives), default=0.0)
    checks.append(
        CheckResult(
            "curvature",
            sharpest <= problem.kappa_max + _CURVATURE_TOL,
            f"max kappa {sharpest:.6g}",
        )
    )

    poses = [problem.start]
    for m in trajectory.primitives:
        poses.append(apply_primitive(poses[-1], m))
    worst = 0.0
    for stored, simulated in zip(trajectory.waypoints, poses):
        worst = max(
            worst,
            float(np.linalg.norm(stored.position - simulated.position)),
            float(tr.quat_angle_between(stored.orientation, simulated.orientation)),
        )
    checks.append(
        CheckResult(
            "consistency", worst <= _CONSISTENCY_TOL, f"max deviation {worst:.3g}"
        )
    )

    blocked = [
        i
        for i, m in enumerate(trajectory.primitives)
        if not arc_free(problem.env, poses[i], m, collision_step)
    ]
    checks.append(
        CheckResult(
            "collision",
            not blocked,
            f"colliding primitives {blocked}" if blocked else "",
        )
    )

    length = float(sum(m.delta_ell for m in trajectory.primitives))
    checks.append(
        CheckResult(
            "length",
            length <= problem.ell_max + _LENGTH_TOL,
            f"{length:.6g} mm of {problem.ell_max:.6g}",
        )
    )

    error = float(np.linalg.norm(poses[-1].position - problem.goal))
    checks.append(
        CheckResult(
            "targeting",
            error <= problem.tau + _TARGET_TOL,
            f"{error:.6g} mm of {problem.tau:.6g}",
        )
    )
    return VerificationReport(checks)
