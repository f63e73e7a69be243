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
Desk-scale training demo.

Provides:
    - SynthConfig / PoseGenerator / generate: forward-kinematics pose datasets
    - ToyRegressor: whitened linear regressor standing in for a network
    - TrainConfig / Trainer / train: SGD under any loss variant
    - ComparisonConfig / VariantComparison / evaluate_variants: the variant table
"""

# === IMPORTS START ===
from .synth import PoseGenerator, SynthConfig, SynthDataset, generate
from .regressor import ToyRegressor
from .trainer import TrainConfig, Trainer, TrainResult, train
from .comparison import (
    ComparisonConfig,
    ComparisonResult,
    RunRecord,
    VariantComparison,
    evaluate_variants,
    predicted_camera_poses,
)
__all__ = [
    'PoseGenerator', 'SynthConfig', 'SynthDataset', 'generate',
    'ToyRegressor',
    'TrainConfig', 'Trainer', 'TrainResult', 'train',
    'ComparisonConfig', 'ComparisonResult', 'RunRecord', 'VariantComparison', 'evaluate_variants',
    'predicted_camera_poses',
]
# === IMPORTS END ===
