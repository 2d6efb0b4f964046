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

"""Environment module."""

from pathlib import Path
from typing import Union

from steerneedle.environment import library
from steerneedle.environment.environment import (
    Bounds,
    Environment,
    PointIndex,
    arc_free,
    estimate_point_spacing,
    point_free,
    points_free,
)
from steerneedle.environment.generation import (
    TestCaseExhaustedError,
    VesselSpec,
    generate_synthetic_scenario,
    generate_test_cases,
)
from steerneedle.environment.scenario import (
    ProblemInstance,
    ScenarioParseError,
    ScenarioValidationError,
    load_point_file,
    load_scenario,
    save_scenario,
)

ALL = list(library.SCENARIO_NAME_TO_CALLABLE.keys())


def load(path_or_name: Union[str, Path]) -> ProblemInstance:
    """Make a ProblemInstance from a scenario file path or a library name.

    Raises:
        ScenarioParseError: If the file is malformed.
        ScenarioValidationError: If the instance is invalid.
        KeyError: If the name is not found in the library.
    """
    path = Path(path_or_name)
    if path.suffix:
        return load_scenario(path)
    if str(path_or_name) not in library.SCENARIO_NAME_TO_CALLABLE:
        raise KeyError(f"Unknown scenario {path_or_name}.")
    return library.SCENARIO_NAME_TO_CALLABLE[str(path_or_name)]()


__all__ = [
    "ALL",
    "Bounds",
    "Environment",
    "PointIndex",
    "ProblemInstance",
    "ScenarioParseError",
    "ScenarioValidationError",
    "TestCaseExhaustedError",
    "VesselSpec",
    "arc_free",
    "estimate_point_spacing",
    "generate_synthetic_scenario",
    "generate_test_cases",
    "load",
    "load_point_file",
    "load_scenario",
    "point_free",
    "points_free",
    "save_scenario",
]
