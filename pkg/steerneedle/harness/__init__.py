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

"""Benchmarking, verification and reference checks."""

from steerneedle.harness.appendix import ALL_SUITES, SuiteResult, check_appendix
from steerneedle.harness.benchmark import (
    ALL_PLANNERS,
    BenchRecord,
    BenchSettings,
    cost,
    run_benchmark,
    success_curve,
    summary_table,
)
from steerneedle.harness.oracles import (
    arc_deviation,
    clearance,
    hausdorff_one_way,
    ode_oracle,
)
from steerneedle.harness.verification import VerificationReport, verify_trajectory

__all__ = [
    "ALL_PLANNERS",
    "ALL_SUITES",
    "BenchRecord",
    "BenchSettings",
    "SuiteResult",
    "VerificationReport",
    "arc_deviation",
    "check_appendix",
    "clearance",
    "cost",
    "hausdorff_one_way",
    "ode_oracle",
    "run_benchmark",
    "success_curve",
    "summary_table",
    "verify_trajectory",
]
