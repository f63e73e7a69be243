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
File formats: fixed-precision JSON and JSON Lines pose datasets.
"""

# === IMPORTS START ===
# jsonio first: representation.normalization imports it while this package initializes.
from .jsonio import dumps, format_float, read_json, write_json
from .records import pose_from_record, pose_to_record, read_poses, read_records, write_poses, write_records
__all__ = [
    'dumps', 'format_float', 'read_json', 'write_json',
    'pose_from_record', 'pose_to_record', 'read_poses', 'read_records', 'write_poses', 'write_records',
]
# === IMPORTS END ===
