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

"""Motion primitives and resolutions."""

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

# Field widths of a packed primitive id.
_CURVATURE_BITS = 8
_LEVEL_BITS = 7
_NUMERATOR_BITS = 64

_TWO_PI = 2 * math.pi
_ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class MotionPrimitive:
    """A circular arc M = (kappa, delta_ell, delta_theta).

    Attributes:
        kappa: Curvature in 1/mm; zero means a straight segment.
        delta_ell: Arc length in mm.
        delta_theta: Rotation of the curving plane about the local Z axis, in rad.
        id: Index used for equivalent-node pruning. It does not take part in
            equality, and is absent for primitives built off the search grid.
    """

    kappa: float
    delta_ell: float
    delta_theta: float = 0.0
    id: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        values = (self.kappa, self.delta_ell, self.delta_theta)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"Primitive parameters must be finite, got {values}.")
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa}.")
        if self.delta_ell <= 0:
            raise ValueError(f"delta_ell must be positive, got {self.delta_ell}.")
        if not -_ANGLE_TOL <= self.delta_theta <= _TWO_PI + _ANGLE_TOL:
            raise ValueError(
                f"delta_theta must lie in [0, 2*pi], got {self.delta_theta}."
            )

    @property
    def turn(self) -> float:
        """Heading change eta = kappa * delta_ell."""
        return self.kappa * self.delta_ell

    def with_id(self, primitive_id: int) -> "MotionPrimitive":
        return replace(self, id=primitive_id)

    def to_dict(self) -> Dict[str, float]:
        return {
            "kappa": float(self.kappa),
            "delta_ell": float(self.delta_ell),
            "delta_theta": float(self.delta_theta),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "MotionPrimitive":
        return cls(
            float(data["kappa"]), float(data["delta_ell"]), float(data["delta_theta"])
        )


@dataclass(frozen=True)
class Resolution:
    """A pair of length (mm) and angle (rad) resolutions."""

    ell: float
    theta: float

    def __post_init__(self) -> None:
        if not (self.ell > 0 and self.theta > 0):
            raise ValueError(
                f"Resolution must be strictly positive, got ({self.ell}, {self.theta})."
            )


def pack_id(
    curvature_index: int,
    ell_level: int,
    ell_numerator: int,
    theta_level: int,
    theta_numerator: int,
) -> int:
    """Packs the dyadic coordinates of a grid primitive into one integer."""
    fields = (
        (curvature_index, _CURVATURE_BITS),
        (ell_level, _LEVEL_BITS),
        (theta_level, _LEVEL_BITS),
        (ell_numerator, _NUMERATOR_BITS),
        (theta_numerator, _NUMERATOR_BITS),
    )
    packed = 0
    shift = 0
    for value, bits in fields:
        if not 0 <= value < (1 << bits):
            raise ValueError(f"Value {value} does not fit in {bits} bits.")
        packed |= value << shift
        shift += bits
    return packed
