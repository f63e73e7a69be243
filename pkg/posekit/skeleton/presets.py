"""
Built-in 17-joint Human3.6M-style skeleton.

Camera convention for the rest template: x to the subject's left, y down,
z away from the camera. Lengths are in millimeters.
"""

from posekit.skeleton.skeleton import SkeletonTopology

H36M_JOINT_NAMES = (
    "Pelvis",
    "RHip", "RKnee", "RAnkle",
    "LHip", "LKnee", "LAnkle",
    "Spine", "Thorax", "Neck", "Head",
    "LShoulder", "LElbow", "LWrist",
    "RShoulder", "RElbow", "RWrist",
)

H36M_PARENTS = (0, 1, 2, 3, 1, 5, 6, 1, 8, 9, 10, 9, 12, 13, 9, 15, 16)

# Joint k whose bend is measured at parent(k): knees/ankles bend hips/knees,
# elbows/wrists bend shoulders/elbows.
H36M_LIMB_JOINTS = (3, 4, 6, 7, 13, 14, 16, 17)

# Unit direction of each bone segment (parent -> joint) in the rest pose, and its length.
H36M_REST_DIRECTIONS = (
    (0.0, 0.0, 0.0),
    (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 1.0, 0.0),
    (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0), (0.0, -1.0, 0.0), (0.0, -1.0, 0.0), (0.0, -1.0, 0.0),
    (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 1.0, 0.0),
    (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 1.0, 0.0),
)

H36M_BONE_LENGTHS = (
    0.0,
    130.0, 450.0, 440.0,
    130.0, 450.0, 440.0,
    230.0, 250.0, 100.0, 120.0,
    150.0, 280.0, 250.0,
    150.0, 280.0, 250.0,
)

# Maximum local rotation (degrees) of each segment about a random axis.
H36M_ANGLE_RANGES = (
    0.0,
    10.0, 60.0, 60.0,
    10.0, 60.0, 60.0,
    15.0, 15.0, 10.0, 20.0,
    10.0, 80.0, 80.0,
    10.0, 80.0, 80.0,
)

# Static interior-angle ranges (degrees), keyed by the distal joint of the bend.
H36M_ANGLE_LIMITS = {
    "RKnee": (0.0, 180.0),
    "RAnkle": (30.0, 180.0),
    "LKnee": (0.0, 180.0),
    "LAnkle": (30.0, 180.0),
    "LElbow": (0.0, 180.0),
    "LWrist": (30.0, 180.0),
    "RElbow": (0.0, 180.0),
    "RWrist": (30.0, 180.0),
}


def h36m_skeleton() -> SkeletonTopology:
    """Default pelvis-rooted 17-joint layout."""
    return SkeletonTopology(
        parent=H36M_PARENTS,
        joint_names=H36M_JOINT_NAMES,
        limb_joints=H36M_LIMB_JOINTS,
    ).validate()
