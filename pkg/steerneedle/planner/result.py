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

"""Planner outputs and the plan file format."""

import enum
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from steerneedle.geometry.pose import Pose
from steerneedle.primitives.motion_primitive import MotionPrimitive

_TIMING_FIELDS = ("wall_time", "time_to_first_solution")


class PlanStatus(enum.Enum):
    SOLVED = "Solved"
    EXHAUSTED = "ExhaustedNoPlan"
    TIMED_OUT = "TimedOut"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A primitive sequence with the tip poses between its arcs."""

    primitives: Tuple[MotionPrimitive, ...]
    waypoints: Tuple[Pose, ...]
    length: float
    targeting_error: float

    def __post_init__(self) -> None:
        if len(self.waypoints) != len(self.primitives) + 1:
            raise ValueError("A trajectory needs one more waypoint than primitives.")

    @property
    def end(self) -> Pose:
        return self.waypoints[-1]

    def cost(self, ell_max: float, tau: float) -> float:
        """Normalized length plus normalized targeting error."""
        return self.length / ell_max + self.targeting_error / tau


@dataclass
class PlanStats:
    nodes_extracted: int = 0
    nodes_expanded: int = 0
    nodes_pruned_similar: int = 0
    nodes_pruned_reachability: int = 0
    nodes_pruned_collision: int = 0
    wall_time: float = 0.0
    time_to_first_solution: Optional[float] = None


@dataclass(frozen=True, eq=False)
class PlanResult:
    status: PlanStatus
    trajectory: Optional[Trajectory]
    stats: PlanStats

    @property
    def solved(self) -> bool:
        return self.status is PlanStatus.SOLVED

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        """Plan file document. Timing fields are omitted when not wanted."""
        stats = asdict(self.stats)
        if not include_timing:
            for key in _TIMING_FIELDS:
                stats.pop(key)
        traj = self.trajectory
        return {
            "status": self.status.value,
            "primitives": [m.to_dict() for m in traj.primitives] if traj else [],
            "waypoints": [x.to_dict() for x in traj.waypoints] if traj else [],
            "length_mm": traj.length if traj else None,
            "targeting_error_mm": traj.targeting_error if traj else None,
            "stats": stats,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PlanResult":
        status = PlanStatus(data["status"])
        trajectory = None
        if data.get("length_mm") is not None:
            trajectory = Trajectory(
                primitives=tuple(
                    MotionPrimitive.from_dict(m) for m in data["primitives"]
                ),
                waypoints=tuple(Pose.from_dict(x) for x in data["waypoints"]),
                length=float(data["length_mm"]),
                targeting_error=float(data["targeting_error_mm"]),
            )
        return cls(status, trajectory, PlanStats(**data.get("stats", {})))


def make_trajectory(
    primitives: Sequence[MotionPrimitive], waypoints: Sequence[Pose], goal: np.ndarray
) -> Trajectory:
    """Builds a trajectory, measuring its length and its end's distance to `goal`."""
    error = float(np.linalg.norm(waypoints[-1].position - np.asarray(goal)))
    return Trajectory(
        primitives=tuple(primitives),
        waypoints=tuple(waypoints),
        length=float(sum(m.delta_ell for m in primitives)),
        targeting_error=error,
    )


def save_plan(result: PlanResult, filename: Union[str, Path]) -> None:
    with open(filename, "w") as f:
        json.dump(result.to_dict(), f, indent=2)


def load_plan(filename: Union[str, Path]) -> PlanResult:
    with open(filename, "r") as f:
        return PlanResult.from_dict(json.load(f))
