# This file is part of the posekit project.
#
# (C) 2025 On Tides of Uncertainty
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at:
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Pose representations and the fixed normalization layers around them.

Provides:
    - Pose / BonePose: joint coordinates and their bone reparameterization
    - joints_to_bones / bones_to_joints: the reparameterization and its inverse
    - NormStats / fit_stats: ground-truth mean/std constants
    - normalize / unnormalize: the constant normalization layer and its inverse
"""

# === IMPORTS START ===
from .representation import (
    BonePose,
    Pose,
    bones_to_joints,
    bones_to_joints_array,
    joints_to_bones,
    joints_to_bones_array,
    stack_coords,
    with_origin,
)
from .normalization import (
    STD_FLOOR,
    NormStats,
    delta_stats_from_joints,
    fit_stats,
    normalize,
    pair_deltas_array,
    unnormalize,
)
__all__ = [
    'BonePose', 'Pose', 'bones_to_joints', 'bones_to_joints_array', 'joints_to_bones',
    'joints_to_bones_array', 'stack_coords', 'with_origin',
    'STD_FLOOR', 'NormStats', 'delta_stats_from_joints', 'fit_stats', 'normalize',
    'pair_deltas_array', 'unnormalize',
]
# === IMPORTS END ===
