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
Pose losses.

Provides:
    - PairSet / build_pair_set: the joint, bone, both and all pair sets
    - compositional_loss, joint_loss, bone_loss, mixed_loss with analytic gradients
    - finite_difference_check: central-difference gradient verification
    - VARIANTS / VariantLoss: the baseline and the four compositional variants
"""

# === IMPORTS START ===
from .pair_set import PairSet, PairSetBuilder, build_pair_set
from .compositional import (
    BatchLoss,
    CompositionalLoss,
    JointLoss,
    LossResult,
    bone_loss,
    compose_delta,
    compositional_loss,
    joint_loss,
    mixed_loss,
    stack_ground_truth,
)
from .gradcheck import GradientCheck, finite_difference_check
from .variants import VARIANTS, Variant, VariantLoss, get_variant, resolve_variants, selection_names
__all__ = [
    'PairSet', 'PairSetBuilder', 'build_pair_set',
    'BatchLoss', 'CompositionalLoss', 'JointLoss', 'LossResult', 'bone_loss', 'compose_delta',
    'compositional_loss', 'joint_loss', 'mixed_loss', 'stack_ground_truth',
    'GradientCheck', 'finite_difference_check',
    'VARIANTS', 'Variant', 'VariantLoss', 'get_variant', 'resolve_variants', 'selection_names',
]
# === IMPORTS END ===
