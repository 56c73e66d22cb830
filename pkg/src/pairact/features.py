"""Per-person explicit features: part velocity/acceleration, inner and outer
posture angles, and joint-anchored patch embeddings.

Velocities are differences between one time step's representative skeleton
and the previous one's, so their unit is pixels per segment. Angles are
scale-, rotation- and translation-invariant by construction. Everything is
pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .embeddings import EmbeddingProvider
from .parts import (
    CONTACT_JOINTS,
    NUM_PARTS,
    OUTER_ANGLE_JOINTS,
    PART_INDICES,
    PART_JOINTS,
)
from .skeleton import Skeleton15

DEGENERATE_LENGTH = 1e-9


class FrameRef(NamedTuple):
    """Identifies whose frame a provider query belongs to."""

    video_id: str
    frame: int
    person: int


@dataclass
class PartVectors:
    """One 2D vector per body part, with per-part absence flags."""

    xy: np.ndarray  # (5, 2)
    absent: np.ndarray  # (5,) bool

    @classmethod
    def zero(cls) -> "PartVectors":
        return cls(np.zeros((NUM_PARTS, 2)), np.ones(NUM_PARTS, dtype=bool))


@dataclass
class MotionFeature:
    v: PartVectors  # velocity, pixels/segment
    a: PartVectors  # acceleration, pixels/segment^2


@dataclass
class PostureFeature:
    theta_in: np.ndarray  # (5,) radians in [0, pi]
    theta_out: np.ndarray  # (4,) radians in [0, pi]
    in_degenerate: np.ndarray  # (5,) bool
    out_degenerate: np.ndarray  # (4,) bool


@dataclass
class PatchEmbedding:
    """One appearance vector per contact joint (head, hands, feet)."""

    vectors: np.ndarray  # (5, D)
    joint_valid: np.ndarray  # (5,) bool


def velocity(prev: Skeleton15, cur: Skeleton15) -> PartVectors:
    """Mean displacement of each part's joints valid in both frames."""
    xy = np.zeros((NUM_PARTS, 2))
    absent = np.zeros(NUM_PARTS, dtype=bool)
    for i, part in enumerate(PART_INDICES):
        joints = list(PART_JOINTS[part])
        both = prev.valid[joints] & cur.valid[joints]
        if both.any():
            diff = cur.xy[joints][both] - prev.xy[joints][both]
            xy[i] = diff.mean(axis=0)
        else:
            absent[i] = True
    return PartVectors(xy, absent)


def acceleration(v_prev: PartVectors, v_cur: PartVectors) -> PartVectors:
    """Per-part velocity difference; absent wherever either input part is."""
    absent = v_prev.absent | v_cur.absent
    xy = np.where(absent[:, None], 0.0, v_cur.xy - v_prev.xy)
    return PartVectors(xy, absent)


def _angle(q1, q2, q3) -> tuple[float, bool]:
    a = q1 - q2
    b = q1 - q3
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na < DEGENERATE_LENGTH or nb < DEGENERATE_LENGTH:
        return 0.0, True
    cos = np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0)
    return float(np.arccos(cos)), False


def _triple_angles(skel: Skeleton15, triples: list) -> tuple[np.ndarray, np.ndarray]:
    theta = np.zeros(len(triples))
    degenerate = np.zeros(len(triples), dtype=bool)
    for i, (j1, j2, j3) in enumerate(triples):
        if not (skel.valid[j1] and skel.valid[j2] and skel.valid[j3]):
            degenerate[i] = True
            continue
        theta[i], degenerate[i] = _angle(skel.xy[j1], skel.xy[j2], skel.xy[j3])
    return theta, degenerate


def inner_angles(skel: Skeleton15) -> tuple[np.ndarray, np.ndarray]:
    """Angle at each part's first joint between its two other joints.

    Returns (theta, degenerate): theta in [0, pi], zero where flagged
    degenerate (zero-length spoke or any joint invalid).
    """
    return _triple_angles(skel, [PART_JOINTS[p] for p in PART_INDICES])


def outer_angles(skel: Skeleton15) -> tuple[np.ndarray, np.ndarray]:
    """Angle between each limb and the body axis, one per limb part."""
    return _triple_angles(skel, [OUTER_ANGLE_JOINTS[p] for p in PART_INDICES[:4]])


def posture(skel: Skeleton15) -> PostureFeature:
    t_in, d_in = inner_angles(skel)
    t_out, d_out = outer_angles(skel)
    return PostureFeature(t_in, t_out, d_in, d_out)


def patch_embeddings(
    provider: EmbeddingProvider, skel: Skeleton15, n: int, ctx: FrameRef
) -> PatchEmbedding:
    """Query the provider with an n-by-n window at each valid contact joint.

    Invalid joints yield zero vectors. A provider lookup failure propagates
    (it already names the missing key).
    """
    if n < 2 or n % 2 != 0:
        raise ValueError(f"patch size must be even and >= 2, got {n}")
    vectors = np.zeros((len(CONTACT_JOINTS), provider.dim))
    joint_valid = np.zeros(len(CONTACT_JOINTS), dtype=bool)
    for slot, joint in enumerate(CONTACT_JOINTS):
        if not skel.valid[joint]:
            continue
        joint_valid[slot] = True
        vectors[slot] = provider.query(
            ctx.video_id, ctx.frame, ctx.person, joint, skel.xy[joint], n
        )
    return PatchEmbedding(vectors, joint_valid)
