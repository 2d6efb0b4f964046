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

"""Scenario files: problem instances on disk."""

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from steerneedle.environment.environment import Bounds, Environment, point_free
from steerneedle.geometry.pose import Pose

_REQUIRED_FIELDS = (
    "kappa_max",
    "ell_max",
    "tau",
    "needle_radius",
    "start",
    "goal",
    "bounds",
    "obstacles",
)


class ScenarioParseError(ValueError):
    """A scenario or point file could not be parsed."""

    def __init__(
        self, message: str, line: Optional[int] = None, field: Optional[str] = None
    ) -> None:
        location = []
        if field is not None:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.line = line
        self.field = field


class ScenarioValidationError(ValueError):
    """A parsed scenario violates a problem precondition."""

    def __init__(self, message: str, invariant: str) -> None:
        super().__init__(f"{message} [{invariant}]")
        self.invariant = invariant


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Planning query: environment, start pose, goal point and needle limits."""

    env: Environment
    start: Pose
    goal: np.ndarray
    tau: float
    ell_max: float
    kappa_max: float

    def __post_init__(self) -> None:
        goal = np.array(self.goal, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(goal)):
            raise ScenarioValidationError("goal must be finite", "goal")
        goal.setflags(write=False)
        object.__setattr__(self, "goal", goal)
        for name in ("tau", "ell_max", "kappa_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ScenarioValidationError(
                    f"{name} must be positive, got {value}", name
                )
            object.__setattr__(self, name, float(value))
        if not point_free(self.env, self.start.position):
            raise ScenarioValidationError(
                f"start {self.start.position.tolist()} is not collision-free",
                "start_free",
            )

    @classmethod
    def from_file(cls, filename: Union[str, Path]) -> "ProblemInstance":
        return load_scenario(filename)

    def save(
        self,
        filename: Union[str, Path],
        obstacles_filename: Optional[Union[str, Path]] = None,
    ) -> None:
        save_scenario(self, filename, obstacles_filename)


def load_point_file(filename: Union[str, Path]) -> np.ndarray:
    """Reads a plain-text cloud with one `x y z` triple per line.

    Blank lines and lines starting with `#` are skipped.

    Raises:
        ScenarioParseError: If a line does not hold exactly three decimal numbers.
    """
    points = []
    with open(filename, "r") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if len(tokens) != 3:
                raise ScenarioParseError(
                    f"expected 3 coordinates in {filename}, got {len(tokens)}",
                    line=lineno,
                )
            try:
                points.append([float(t) for t in tokens])
            except ValueError:
                raise ScenarioParseError(
                    f"non-numeric coordinate in {filename}", line=lineno
                ) from None
    return np.asarray(points, dtype=np.float64).reshape(-1, 3)


def save_point_file(points: np.ndarray, filename: Union[str, Path]) -> None:
    with open(filename, "w") as f:
        for x, y, z in np.asarray(points, dtype=np.float64).reshape(-1, 3).tolist():
            f.write(f"{x!r} {y!r} {z!r}\n")


def _vector(data: Mapping[str, Any], key: str, size: int, field: str) -> np.ndarray:
    value = data.get(key)
    try:
        array = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise ScenarioParseError("expected a list of numbers", field=field) from None
    if array.shape != (size,):
        raise ScenarioParseError(f"expected {size} numbers", field=field)
    return array


def _number(data: Mapping[str, Any], key: str) -> float:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError("expected a number", field=key)
    return float(value)


def _obstacles(value: Any, base_dir: Path) -> np.ndarray:
    if isinstance(value, str):
        path = base_dir / value
        if not path.is_file():
            raise ScenarioParseError(f"point file {path} not found", field="obstacles")
        return load_point_file(path)
    try:
        points = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise ScenarioParseError(
            "expected a list of [x, y, z] triples or a path", field="obstacles"
        ) from None
    if points.size == 0:
        return np.empty((0, 3))
    if points.ndim != 2 or points.shape[1] != 3:
        raise ScenarioParseError("expected [x, y, z] triples", field="obstacles")
    return points


def parse_scenario(
    data: Dict[str, Any], base_dir: Union[str, Path] = "."
) -> ProblemInstance:
    """Builds a validated `ProblemInstance` from a decoded scenario document."""
    if not isinstance(data, dict):
        raise ScenarioParseError("scenario must be a JSON object")
    for key in _REQUIRED_FIELDS:
        if key not in data:
            raise ScenarioParseError("missing required field", field=key)

    kappa_max = _number(data, "kappa_max")
    ell_max = _number(data, "ell_max")
    tau = _number(data, "tau")
    needle_radius = _number(data, "needle_radius")
    clearance_margin = (
        _number(data, "clearance_margin") if "clearance_margin" in data else None
    )

    start = data["start"]
    if not isinstance(start, dict):
        raise ScenarioParseError("expected an object", field="start")
    position = _vector(start, "position", 3, "start.position")
    quaternion = _vector(start, "quaternion", 4, "start.quaternion")
    try:
        start_pose = Pose(position, quaternion)
    except ValueError as e:
        raise ScenarioValidationError(str(e), "start_pose") from None

    goal = _vector(data, "goal", 3, "goal")
    bounds = data["bounds"]
    if not isinstance(bounds, dict):
        raise ScenarioParseError("expected an object", field="bounds")
    minimum = _vector(bounds, "min", 3, "bounds.min")
    maximum = _vector(bounds, "max", 3, "bounds.max")
    points = _obstacles(data["obstacles"], Path(base_dir))

    try:
        box = Bounds(minimum, maximum)
    except ValueError as e:
        raise ScenarioValidationError(str(e), "bounds") from None
    try:
        env = Environment(points, box, needle_radius, clearance_margin)
    except ValueError as e:
        raise ScenarioValidationError(str(e), "environment") from None
    return ProblemInstance(
        env=env,
        start=start_pose,
        goal=goal,
        tau=tau,
        ell_max=ell_max,
        kappa_max=kappa_max,
    )


def load_scenario(filename: Union[str, Path]) -> ProblemInstance:
    """Loads and validates a scenario file.

    Args:
        filename: Path to a JSON scenario. A string-valued `obstacles` field is
            resolved relative to the scenario's directory.

    Raises:
        ScenarioParseError: On malformed JSON or missing/ill-typed fields.
        ScenarioValidationError: When the instance violates a problem precondition.
    """
    filename = Path(filename)
    text = filename.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    return parse_scenario(data, base_dir=filename.parent)


def scenario_to_dict(
    problem: ProblemInstance, obstacles: Optional[str] = None
) -> Dict[str, Any]:
    env = problem.env
    return {
        "kappa_max": problem.kappa_max,
        "ell_max": problem.ell_max,
        "tau": problem.tau,
        "needle_radius": env.needle_radius,
        "clearance_margin": env.clearance_margin,
        "start": problem.start.to_dict(),
        "goal": [float(v) for v in problem.goal],
        "bounds": {
            "min": [float(v) for v in env.bounds.minimum],
            "max": [float(v) for v in env.bounds.maximum],
        },
        "obstacles": (
            obstacles
            if obstacles is not None
            else [[float(v) for v in p] for p in env.obstacle_points]
        ),
    }


def save_scenario(
    problem: ProblemInstance,
    filename: Union[str, Path],
    obstacles_filename: Optional[Union[str, Path]] = None,
) -> None:
    """Writes `problem` as JSON.

    With `obstacles_filename` the cloud goes to a separate point file that the
    scenario references by relative path; otherwise it is inlined.
    """
    filename = Path(filename)
    reference = None
    if obstacles_filename is not None:
        obstacles_filename = Path(obstacles_filename)
        save_point_file(problem.env.obstacle_points, obstacles_filename)
        relative = os.path.relpath(
            obstacles_filename.resolve(), filename.parent.resolve()
        )
        reference = Path(relative).as_posix()
    with open(filename, "w") as f:
        json.dump(scenario_to_dict(problem, reference), f, indent=2)
