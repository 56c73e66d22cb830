"""Joint layout constants: the 15-joint skeleton and its five body parts.

Joint indices (15-joint skeleton):
    0 head, 1 neck,
    2 right shoulder, 3 right elbow, 4 right hand,
    5 left shoulder, 6 left elbow, 7 left hand,
    8 right hip, 9 right knee, 10 right foot,
    11 left hip, 12 left knee, 13 left foot,
    14 hip center (synthesized midpoint of joints 8 and 11).

Parts are numbered 1..5 throughout the public API.
"""

NUM_RAW_JOINTS = 18
NUM_JOINTS = 15

HEAD = 0
NECK = 1
HIP_CENTER = 14

# Raw 18-joint pose: face joints used only for the head fallback.
RAW_RIGHT_HIP = 8
RAW_LEFT_HIP = 11
RAW_FACE_JOINTS = (14, 15, 16, 17)

RIGHT_ARM = 1
LEFT_ARM = 2
RIGHT_LEG = 3
LEFT_LEG = 4
TORSO = 5

PART_JOINTS = {
    RIGHT_ARM: (2, 3, 4),
    LEFT_ARM: (5, 6, 7),
    RIGHT_LEG: (8, 9, 10),
    LEFT_LEG: (11, 12, 13),
    TORSO: (0, 1, 14),
}

# Triples for the angle between a limb and the body: (neck, limb root, limb mid).
OUTER_ANGLE_JOINTS = {
    RIGHT_ARM: (1, 2, 3),
    LEFT_ARM: (1, 5, 6),
    RIGHT_LEG: (1, 8, 9),
    LEFT_LEG: (1, 11, 12),
}

# Joints where interactions are expected to touch: head, hands, feet.
CONTACT_JOINTS = (0, 4, 7, 10, 13)

# Part containing each contact joint, in CONTACT_JOINTS order.
CONTACT_JOINT_PART = {0: TORSO, 4: RIGHT_ARM, 7: LEFT_ARM, 10: RIGHT_LEG, 13: LEFT_LEG}

PART_INDICES = (RIGHT_ARM, LEFT_ARM, RIGHT_LEG, LEFT_LEG, TORSO)
NUM_PARTS = 5


def _check_partition():
    covered = sorted(j for joints in PART_JOINTS.values() for j in joints)
    assert covered == list(range(NUM_JOINTS)), "parts must partition joints 0..14"


_check_partition()
