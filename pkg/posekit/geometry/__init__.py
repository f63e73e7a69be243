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
Geometry helpers shared by metrics and the training demo.

Includes:
    - Procrustes alignment (similarity or rigid, reflections excluded)
    - Pinhole projection and back-projection
"""

# === IMPORTS START ===
from .camera import PinholeCamera, backproject, project
from .procrustes import SimilarityTransform, procrustes_align
__all__ = ['PinholeCamera', 'backproject', 'project', 'SimilarityTransform', 'procrustes_align']
# === IMPORTS END ===
