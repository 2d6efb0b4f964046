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

"""Named numerical property suites for kinematics and approximation bounds.

Each suite draws its own random cases from a fixed seed and reports whether every
case satisfied the property, together with the worst value observed.
"""

import math
import time
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from absl import logging

from steerneedle import constants as consts
from steerneedle.geometry import pose as pose_lib
from steerneedle.geometry import transformations as tr
from steerneedle.geometry.pose import Pose
from steerneedle.harness import oracles
from steerneedle.primitives import approximation
from steerneedle.primitives.motion_primitive import MotionPrimitive

_SEED = 12345

_KINEMATICS_TOL = 1e-6
_SAMPLE_STEP = 0.1


class SuiteResult(NamedTuple):
    name: str
    passed: bool
    cases: int
    detail: str
    seconds: float = 0.0


def _random_pose(random_state: np.random.RandomState) -> Pose:
    return Pose(random_state.uniform(-50, 50, size=3), random_state.normal(size=4))


def _random_angle(random_state: np.random.RandomState) -> float:
    return random_state.uniform(0.0, 2 * math.pi)


def kinematics_oracle(num_cases: int = 1000, seed: int = _SEED) -> SuiteResult:
    """Closed-form arc end poses agree with numerically integrated kinematics."""
    random_state = np.random.RandomState(seed)
    poses, primitives = [], []
    for _ in range(num_cases):
        poses.append(_random_pose(random_state))
        primitives.append(
            MotionPrimitive(
                random_state.uniform(0.0, consts.KAPPA_MAX),
                random_state.uniform(1e-3, consts.DELTA_ELL_MAX),
                _random_angle(random_state),
            )
        )
    integrated = oracles.ode_oracle_batch(poses, primitives)
    worst_position, worst_angle = 0.0, 0.0
    for pose, m, end in zip(poses, primitives, integrated):
        exact = pose_lib.apply_primitive(pose, m)
        worst_position = max(
            worst_position, float(np.linalg.norm(end.position - exact.position))
        )
        worst_angle = max(
            worst_angle,
            float(tr.quat_angle_between(end.orientation, exact.orientation)),
        )
    passed = worst_position <= _KINEMATICS_TOL and worst_angle <= _KINEMATICS_TOL
    detail = f"max position error {worst_position:.3g} mm, angle {worst_angle:.3g} rad"
    return SuiteResult("kinematics-oracle", passed, num_cases, detail)


def _chain_positions(start: Pose, primitives: Sequence[MotionPrimitive]) -> np.ndarray:
    pose = start
    points = []
    for m in primitives:
        points.append(pose_lib.arc_positions(pose, m, _SAMPLE_STEP))
        pose = pose_lib.apply_primitive(pose, m)
    return np.concatenate(points)


def duty_cycling(num_cases: int = 100, seed: int = _SEED) -> SuiteResult:
    """Duty-cycled sequences stay within the requested deviation of their target.

    The measured deviation must also respect the per-chunk analytic bound.
    """
    random_state = np.random.RandomState(seed)
    violations = 0
    worst_ratio = 0.0
    for _ in range(num_cases):
        kappa = random_state.uniform(1e-4, 0.999 * consts.KAPPA_MAX)
        length = random_state.uniform(1.0, consts.ELL_MAX)
        theta = _random_angle(random_state)
        epsilon = random_state.uniform(0.05, 0.5)
        start = _random_pose(random_state)
        target = MotionPrimitive(kappa, length, theta)

        decomposed = approximation.duty_cycle_decompose(
            kappa, length, theta, consts.KAPPA_MAX, epsilon
        )
        deviation = oracles.arc_deviation(
            _chain_positions(start, decomposed), start, target
        )
        chunk = length / (len(decomposed) // 3)
        bound = approximation.deviation_bound(kappa, chunk)
        if not (deviation < epsilon and deviation <= bound + 1e-12):
            violations += 1
        worst_ratio = max(worst_ratio, deviation / epsilon)
    detail = f"{violations} violations, max deviation/epsilon {worst_ratio:.3f}"
    return SuiteResult("duty-cycling", violations == 0, num_cases, detail)


def action_distance(
    num_cases: int = 500, seed: int = _SEED, alpha: float = consts.ALPHA
) -> SuiteResult:
    """Equal-curvature primitives are as close as their parameter differences allow.

    The allowance covers the angular term of the metric and the sampling step.
    """
    random_state = np.random.RandomState(seed)
    violations = 0
    worst_ratio = 0.0
    for _ in range(num_cases):
        kappa = random_state.choice([0.0, random_state.uniform(0.0, consts.KAPPA_MAX)])
        m1, m2 = (
            MotionPrimitive(
                kappa,
                random_state.uniform(0.1, consts.DELTA_ELL_MAX),
                _random_angle(random_state),
            )
            for _ in range(2)
        )
        d_theta = abs(m1.delta_theta - m2.delta_theta)
        d_ell = abs(m1.delta_ell - m2.delta_ell)
        bound = (
            d_theta * min(m1.delta_ell, m2.delta_ell)
            + d_ell
            + alpha * (d_theta + kappa * d_ell)
            + _SAMPLE_STEP * (1 + alpha * kappa)
        )
        measured = approximation.action_distance(m1, m2, alpha, _SAMPLE_STEP)
        if not measured < bound:
            violations += 1
        worst_ratio = max(worst_ratio, measured / bound)
    detail = f"{violations} violations, max measured/bound {worst_ratio:.3f}"
    return SuiteResult("action-distance", violations == 0, num_cases, detail)


def d_sim_bound(num_cases: int = 100, seed: int = _SEED) -> SuiteResult:
    """The similar-node radius bound is finite, capped and monotone.

    Also checks the known closed-form values and that the default planner
    configuration bound is negligible, which is why its radius is set empirically.
    """
    random_state = np.random.RandomState(seed)
    failures: List[str] = []

    small = approximation.d_sim_bound(1.0, 10.0, 5.0, 1.1)
    if abs(small.value - 0.1 / 0.42) > 1e-9 or small.negligible:
        failures.append(f"closed form {small.value}")
    limit = approximation.d_sim_bound(1.0, 10.0, 1.0, 1.0 + 1e-9)
    if abs(limit.value - 1.0 / 20) > 1e-6:
        failures.append(f"near-one limit {limit.value}")
    default = approximation.d_sim_bound(
        consts.TAU, consts.ELL_MAX, consts.CUTOFF_ELL, 2.0
    )
    if not default.negligible:
        failures.append("default configuration bound is not negligible")

    for _ in range(num_cases):
        tau = random_state.uniform(0.1, 5.0)
        ell_min = random_state.uniform(0.5, 20.0)
        ell_max = random_state.uniform(ell_min, 100.0)
        lipschitz = random_state.uniform(1.01, 3.0)
        bound = approximation.d_sim_bound(tau, ell_max, ell_min, lipschitz)
        looser = approximation.d_sim_bound(2 * tau, ell_max, ell_min, lipschitz)
        if not (0.0 <= bound.value <= ell_min and math.isfinite(bound.value)):
            failures.append(f"out of range {bound.value}")
        if looser.value < bound.value:
            failures.append("not monotone in tau")
    detail = f"{len(failures)} failures" + (f": {failures[:3]}" if failures else "")
    return SuiteResult("d-sim-bound", not failures, num_cases + 3, detail)


SUITE_NAME_TO_CALLABLE: Dict[str, Callable[[], SuiteResult]] = {
    "kinematics-oracle": kinematics_oracle,
    "duty-cycling": duty_cycling,
    "action-distance": action_distance,
    "d-sim-bound": d_sim_bound,
}

ALL_SUITES = tuple(SUITE_NAME_TO_CALLABLE.keys())


def check_appendix(names: Optional[Sequence[str]] = None) -> List[SuiteResult]:
    """Runs the named suites, or all of them, and returns their results in order.

    Raises:
        KeyError: if a suite name is unknown.
    """
    names = ALL_SUITES if names is None else tuple(names)
    for name in names:
        if name not in SUITE_NAME_TO_CALLABLE:
            raise KeyError(f"Unknown suite {name!r}. Available: {ALL_SUITES}.")
    results = []
    for name in names:
        start = time.perf_counter()
        result = SUITE_NAME_TO_CALLABLE[name]()
        result = result._replace(seconds=time.perf_counter() - start)
        logging.info(
            "%s: %s (%s) in %.2fs.",
            name,
            "passed" if result.passed else "FAILED",
            result.detail,
            result.seconds,
        )
        results.append(result)
    return results
