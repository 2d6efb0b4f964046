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

"""Multi-resolution hierarchy of motion primitives.

A primitive's length level is the smallest l with delta_ell a multiple of
2^-l * delta_ell_max, and its angle level is defined the same way against
delta_theta_max. Refinement halves the grid in one coordinate at a time.
"""

import functools
import math
from typing import Iterable, List

from steerneedle.primitives.motion_primitive import (
    MotionPrimitive,
    Resolution,
    pack_id,
)

# Deepest level searched before a value is declared off the dyadic grid.
_MAX_LEVEL = 60

# Remainder tolerance, relative to the coarsest grid step.
_REL_TOL = 1e-9

_TWO_PI = 2 * math.pi


class NoLevelError(ValueError):
    """Raised when a value does not lie on the dyadic grid."""


@functools.lru_cache(maxsize=None)
def _level(value: float, maximum: float) -> int:
    tol = _REL_TOL * maximum
    for level in range(_MAX_LEVEL + 1):
        grid = maximum * 2.0**-level
        if grid <= 2 * tol:
            break
        remainder = math.fmod(value, grid)
        if remainder <= tol or grid - remainder <= tol:
            return level
    raise NoLevelError(f"{value} is not on the dyadic grid of {maximum}.")


def _numerator(value: float, maximum: float, level: int) -> int:
    return int(round(value / (maximum * 2.0**-level)))


def _wrap_angle(angle: float) -> float:
    wrapped = angle % _TWO_PI
    if _TWO_PI - wrapped <= _REL_TOL * _TWO_PI:
        return 0.0
    return wrapped


def length_level(m: MotionPrimitive, delta_ell_max: float) -> int:
    if not 0 < m.delta_ell <= delta_ell_max * (1 + _REL_TOL):
        raise ValueError(
            f"delta_ell {m.delta_ell} is outside (0, {delta_ell_max}]."
        )
    return _level(m.delta_ell, delta_ell_max)


def angle_level(m: MotionPrimitive, delta_theta_max: float) -> int:
    return _level(m.delta_theta, delta_theta_max)


def primitive_id(
    m: MotionPrimitive, delta_ell_max: float, delta_theta_max: float
) -> int:
    """Injective id of a grid primitive with curvature in {0, kappa_max}."""
    ell_level = length_level(m, delta_ell_max)
    theta_level = angle_level(m, delta_theta_max)
    return pack_id(
        curvature_index=int(m.kappa > 0),
        ell_level=ell_level,
        ell_numerator=_numerator(m.delta_ell, delta_ell_max, ell_level),
        theta_level=theta_level,
        theta_numerator=_numerator(m.delta_theta, delta_theta_max, theta_level),
    )


def _grid_primitive(
    kappa: float,
    delta_ell: float,
    delta_theta: float,
    delta_ell_max: float,
    delta_theta_max: float,
) -> MotionPrimitive:
    m = MotionPrimitive(kappa, delta_ell, _wrap_angle(delta_theta))
    return m.with_id(primitive_id(m, delta_ell_max, delta_theta_max))


def coarsest_primitives(
    curvatures: Iterable[float],
    delta_ell_max: float,
    thetas: Iterable[float],
    delta_theta_max: float = math.pi / 2,
) -> List[MotionPrimitive]:
    """All (kappa, delta_ell_max, theta) combinations, each at level (0, 0)."""
    curvatures = list(curvatures)
    thetas = list(thetas)
    if not curvatures or not thetas:
        raise ValueError("Curvature and angle sets must be non-empty.")
    return [
        _grid_primitive(kappa, delta_ell_max, theta, delta_ell_max, delta_theta_max)
        for kappa in curvatures
        for theta in thetas
    ]


def refine(
    m: MotionPrimitive, delta_ell_max: float, delta_theta_max: float
) -> List[MotionPrimitive]:
    """Neighbours of `m` one level finer in length and in angle.

    The longer-length neighbour is skipped at length level 0 and the smaller-angle
    neighbour is skipped at angle level 0.
    """
    ell_level = length_level(m, delta_ell_max)
    theta_level = angle_level(m, delta_theta_max)
    ell_step = delta_ell_max * 2.0 ** -(ell_level + 1)
    theta_step = delta_theta_max * 2.0 ** -(theta_level + 1)

    refined = [(m.delta_ell - ell_step, m.delta_theta)]
    if ell_level > 0:
        refined.append((m.delta_ell + ell_step, m.delta_theta))
    if theta_level > 0:
        refined.append((m.delta_ell, m.delta_theta - theta_step))
    refined.append((m.delta_ell, m.delta_theta + theta_step))

    return [
        _grid_primitive(m.kappa, ell, theta, delta_ell_max, delta_theta_max)
        for ell, theta in refined
    ]


def rank(
    parent_rank: int,
    m: MotionPrimitive,
    delta_ell_max: float,
    delta_theta_max: float,
) -> int:
    """Search priority of the node reached from a parent through `m`."""
    if parent_rank < 0:
        raise ValueError(f"parent_rank must be non-negative, got {parent_rank}.")
    return (
        parent_rank
        + length_level(m, delta_ell_max)
        + angle_level(m, delta_theta_max)
        + 1
    )


def below_cutoff(
    m: MotionPrimitive,
    cutoff: Resolution,
    delta_ell_max: float,
    delta_theta_max: float,
) -> bool:
    """Whether either grid step of `m` is finer than the cutoff resolution."""
    ell_grid = delta_ell_max * 2.0 ** -length_level(m, delta_ell_max)
    theta_grid = delta_theta_max * 2.0 ** -angle_level(m, delta_theta_max)
    return ell_grid < cutoff.ell or theta_grid < cutoff.theta


def finest_set(
    resolution: Resolution, curvatures: Iterable[float]
) -> List[MotionPrimitive]:
    """Primitives (kappa, r_ell, n * r_theta) for n = 0..floor(2*pi / r_theta).

    Ids are plain enumeration indices; they are unique within the set.
    """
    count = int(math.floor(_TWO_PI / resolution.theta + _REL_TOL))
    primitives = []
    for kappa in curvatures:
        for n in range(count + 1):
            m = MotionPrimitive(kappa, resolution.ell, n * resolution.theta)
            primitives.append(m.with_id(len(primitives)))
    return primitives
