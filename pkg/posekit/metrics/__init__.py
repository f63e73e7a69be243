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
Pose evaluation metrics.

Provides:
    - joint_error, pa_joint_error, bone_error, bone_std
    - AngleLimits / illegal_angle_rate: static-limit illegal-angle checker
    - MetricsEvaluator / evaluate_poses: the aggregated MetricsReport
    - backproject_pose: pixel pose plus depths to camera space
"""

# === IMPORTS START ===
from .metrics import BoneStd, ErrorBreakdown, bone_error, bone_lengths, bone_std, joint_error, pa_joint_error
from .angles import AngleLimits, AngleReport, bend_angle, bend_angles, illegal_angle_rate
from .report import MetricsEvaluator, MetricsReport, backproject_pose, evaluate_poses
__all__ = [
    'BoneStd', 'ErrorBreakdown', 'bone_error', 'bone_lengths', 'bone_std', 'joint_error', 'pa_joint_error',
    'AngleLimits', 'AngleReport', 'bend_angle', 'bend_angles', 'illegal_angle_rate',
    'MetricsEvaluator', 'MetricsReport', 'backproject_pose', 'evaluate_poses',
]
# === IMPORTS END ===
