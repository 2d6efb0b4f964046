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

"""Approximation properties of motion primitives.

Duty cycling replaces an intermediate-curvature arc by straight and
maximum-curvature pieces. The action distance compares two primitives as
trajectories from a common start pose.
"""

import math
from typing import List, NamedTuple

import numpy as np

from steerneedle import constants
from steerneedle.geometry.pose import (
    Pose,
    arc_frames,
    directed_hausdorff,
    sample_arc_lengths,
)
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Halvings tried before giving up on meeting a deviation tolerance.
_MAX_HALVINGS = 60

# d_sim terms below this fraction of the minimum length are reported as 0.0.
_NEGLIGIBLE_RATIO = float(np.finfo(np.float64).eps)


class DSimBound(NamedTuple):
    """Similar-node radius bound; `value` is 0.0 when `negligible` is set."""

    value: float
    negligible: bool


def deviation_bound(kappa: float, chunk_length: float) -> float:
    """Worst-case distance between an arc chunk and its duty-cycled replacement.

    This is the distance from the chunk's midpoint to the intersection of its end
    tangents, r * (1 / cos(eta / 2) - 1).
    """
    if kappa == 0:
        return 0.0
    radius = 1.0 / kappa
    eta = chunk_length / radius
    if eta >= math.pi:
        return math.inf
    return radius * (1.0 / math.cos(0.5 * eta) - 1.0)


def duty_cycle_decompose(
    kappa_target: float,
    length: float,
    delta_theta_initial: float,
    kappa_max: float,
    epsilon: float,
) -> List[MotionPrimitive]:
    """Approximates the arc (kappa_target, length, delta_theta_initial).

    The arc is split into 2^k equal chunks, k being the smallest value for which
    `deviation_bound` falls strictly below `epsilon`. Each chunk becomes a straight
    piece, a kappa_max arc sweeping the same angle, and an equal straight piece,
    which reproduces the chunk's end pose exactly. Only the first primitive rotates
    the curving plane.
    """
    if not 0 <= kappa_target <= kappa_max:
        raise ValueError(f"kappa_target must lie in [0, {kappa_max}].")
    if length <= 0 or epsilon <= 0:
        raise ValueError("length and epsilon must be positive.")

    if kappa_target == 0 or kappa_target == kappa_max:
        return [MotionPrimitive(kappa_target, length, delta_theta_initial)]

    halvings = 0
    while deviation_bound(kappa_target, length / 2**halvings) >= epsilon:
        halvings += 1
        if halvings > _MAX_HALVINGS:
            raise ValueError(f"Cannot reach deviation {epsilon} for this arc.")
    chunks = 2**halvings
    eta = kappa_target * length / chunks
    straight = (1.0 / kappa_target - 1.0 / kappa_max) * math.tan(0.5 * eta)
    turning = eta / kappa_max

    primitives = []
    for i in range(chunks):
        theta = delta_theta_initial if i == 0 else 0.0
        primitives.append(MotionPrimitive(0.0, straight, theta))
        primitives.append(MotionPrimitive(kappa_max, turning, 0.0))
        primitives.append(MotionPrimitive(0.0, straight, 0.0))
    return primitives


def action_distance(
    m1: MotionPrimitive,
    m2: MotionPrimitive,
    alpha: float = constants.ALPHA,
    step: float = constants.HAUSDORFF_STEP,
) -> float:
    """Two-way Hausdorff distance between m1 and m2 executed from the identity pose."""
    origin = Pose.identity()
    pos1, quat1 = arc_frames(
        origin, m1.kappa, sample_arc_lengths(m1.delta_ell, step), m1.delta_theta
    )
    pos2, quat2 = arc_frames(
        origin, m2.kappa, sample_arc_lengths(m2.delta_ell, step), m2.delta_theta
    )
    return max(
        directed_hausdorff(pos1, quat1, pos2, quat2, alpha),
        directed_hausdorff(pos2, quat2, pos1, quat1, alpha),
    )


def d_sim_bound(
    tau: float, ell_max: float, delta_ell_min: float, lipschitz: float
) -> DSimBound:
    """Largest similar-node radius that keeps the search resolution complete.

    Returns min(delta_ell_min, tau (L - 1) / (2 (L^H - 1))) with
    H = ceil(ell_max / delta_ell_min). The second term is evaluated in log space.
    When it is below machine epsilon times delta_ell_min the result is the 0.0
    sentinel with `negligible` set. This happens long before the term itself
    would underflow a double.
    """
    if lipschitz <= 1:
        raise ValueError(f"Lipschitz constant must exceed 1, got {lipschitz}.")
    if min(tau, ell_max, delta_ell_min) <= 0:
        raise ValueError("tau, ell_max and delta_ell_min must be positive.")
    horizon = math.ceil(ell_max / delta_ell_min)
    log_growth = math.log1p(lipschitz - 1.0)
    # log(L^H - 1) = log(expm1(H log L)), rewritten to stay finite for large H.
    h_log = horizon * log_growth
    if h_log > 30.0:
        log_denominator = h_log + math.log1p(-math.exp(-h_log))
    else:
        log_denominator = math.log(math.expm1(h_log))
    log_term = (
        math.log(tau) + math.log(lipschitz - 1.0) - math.log(2.0) - log_denominator
    )
    if log_term < math.log(_NEGLIGIBLE_RATIO * delta_ell_min):
        return DSimBound(0.0, True)
    return DSimBound(min(delta_ell_min, math.exp(log_term)), False)
