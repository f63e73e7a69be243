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
This module is part of **posekit**, a Python toolkit for training and
evaluating 3D human pose regressors with compositional (bone-aware) losses.

Provides:
    - skeleton: kinematic trees, paths between joints and the 17-joint preset
    - representation: joint/bone conversion and normalization statistics
    - geometry: pinhole projection and Procrustes alignment
    - losses: pair sets, the compositional loss family and gradient checks
    - metrics: joint, bone, Procrustes, bone-std and illegal-angle metrics
    - training: synthetic data, a toy regressor and the variant comparison
    - io: JSON and JSONL record helpers
"""

# === IMPORTS START ===
from . import exceptions
from . import skeleton
from . import representation
from . import geometry
from . import io
from . import losses
from . import metrics
from . import training
__all__ = ['exceptions', 'geometry', 'io', 'losses', 'metrics', 'representation', 'skeleton', 'training']
# === IMPORTS END ===

__version__ = "0.1.1"
