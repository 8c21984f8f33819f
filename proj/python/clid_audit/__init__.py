# Copyright 2026 The CLiD Audit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the clid-audit membership-inference toolkit."""

from ._core import (
    NoiseSchedule,
    RuntimeFailure,
    canonical_config,
    forward_diffuse,
    linear_schedule,
    roc_auc,
    run_pipeline,
    sha256_hex,
    theorem_check,
    tpr_at_fpr,
)

__all__ = [
    "NoiseSchedule",
    "RuntimeFailure",
    "canonical_config",
    "forward_diffuse",
    "linear_schedule",
    "roc_auc",
    "run_pipeline",
    "sha256_hex",
    "theorem_check",
    "tpr_at_fpr",
]
