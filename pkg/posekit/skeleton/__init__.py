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
Kinematic tree definitions.

Provides:
    - SkeletonTopology: parent-indexed tree with a virtual origin joint
    - TreePath / PathStep: signed bone paths between two joints
    - validate / path_between: tree checks and lowest-common-ancestor paths
    - h36m_skeleton: the built-in 17-joint layout
"""

# === IMPORTS START ===
from .skeleton import ORIGIN, PathStep, SkeletonTopology, TreePath, path_between, validate
from .presets import h36m_skeleton
__all__ = ['ORIGIN', 'PathStep', 'SkeletonTopology', 'TreePath', 'path_between', 'validate', 'h36m_skeleton']
# === IMPORTS END ===
