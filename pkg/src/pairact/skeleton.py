"""Skeleton post-processing: 18-to-15 joint conversion, detection-box validity
filtering, missing-joint interpolation, and greedy box-overlap tracking.

All coordinates are pixels. Invalid joints carry no meaningful coordinates and
must never be read as positions; every operation here consults validity flags
before touching coordinates. All functions are pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .parts import (
    HEAD,
    HIP_CENTER,
    NUM_JOINTS,
    NUM_RAW_JOINTS,
    PART_JOINTS,
    RAW_FACE_JOINTS,
    RAW_LEFT_HIP,
    RAW_RIGHT_HIP,
    TORSO,
)


@dataclass
class RawPose18:
    """One person's raw 18-joint pose estimate for a single frame."""

    xy: np.ndarray  # (18, 2) float
    valid: np.ndarray  # (18,) bool

    def __post_init__(self):
        self.xy = np.asarray(self.xy, dtype=np.float64).reshape(NUM_RAW_JOINTS, 2)
        self.valid = np.asarray(self.valid, dtype=bool).reshape(NUM_RAW_JOINTS)


@dataclass
class Skeleton15:
    """A converted 15-joint skeleton. Treated as immutable once built."""

    xy: np.ndarray  # (15, 2) float
    valid: np.ndarray  # (15,) bool
    person_id: int = -1
    # True where the coordinate was restored by gap interpolation.
    interpolated: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.xy = np.asarray(self.xy, dtype=np.float64).reshape(NUM_JOINTS, 2)
        self.valid = np.asarray(self.valid, dtype=bool).reshape(NUM_JOINTS)
        if self.interpolated is None:
            self.interpolated = np.zeros(NUM_JOINTS, dtype=bool)
        else:
            self.interpolated = np.asarray(self.interpolated, dtype=bool).reshape(NUM_JOINTS)

    @classmethod
    def all_invalid(cls, person_id: int = -1) -> "Skeleton15":
        return cls(np.zeros((NUM_JOINTS, 2)), np.zeros(NUM_JOINTS, dtype=bool), person_id)


@dataclass
class DetectionBox:
    """Axis-aligned detection box, width/height strictly positive."""

    x: float
    y: float
    w: float
    h: float
    person_id: int = -1

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"detection box must have positive size, got w={self.w}, h={self.h}")

    def center(self) -> np.ndarray:
        return np.array([self.x + self.w / 2.0, self.y + self.h / 2.0])

    def contains(self, pt) -> bool:
        x, y = float(pt[0]), float(pt[1])
        return self.x <= x <= self.x + self.w and self.y <= y <= self.y + self.h


@dataclass
class Detection:
    """One detected object in one frame. ``pose`` is None for non-human
    objects (vehicles, boxes); they get a pseudo-skeleton at the box center
    and skip the head/torso validity check."""

    box: DetectionBox
    pose: RawPose18 | None = None

    @property
    def is_object(self) -> bool:
        return self.pose is None


@dataclass
class TrackedSequence:
    """One identity's per-frame skeletons and boxes over a whole clip.

    Covers every frame index; frames where the identity was not detected
    carry an all-invalid skeleton and the nearest known box.
    """

    person_id: int
    frames: list  # list of (Skeleton15, DetectionBox), one per frame
    frame_rate: float = 30.0
    is_object: bool = False

    def __len__(self):
        return len(self.frames)

    def skeletons(self) -> list:
        return [s for s, _ in self.frames]


def convert_pose(raw: RawPose18) -> Skeleton15:
    """Convert a raw 18-joint pose to the 15-joint skeleton.

    Joints 0..13 copy coordinates and validity. The hip center (joint 14) is
    the midpoint of raw joints 8 and 11, valid only when both are. If the raw
    head is invalid, the head becomes the mean of the valid face joints.
    """
    xy = np.zeros((NUM_JOINTS, 2))
    valid = np.zeros(NUM_JOINTS, dtype=bool)

    xy[:14] = raw.xy[:14]
    valid[:14] = raw.valid[:14]

    if raw.valid[RAW_RIGHT_HIP] and raw.valid[RAW_LEFT_HIP]:
        xy[HIP_CENTER] = (raw.xy[RAW_RIGHT_HIP] + raw.xy[RAW_LEFT_HIP]) / 2.0
        valid[HIP_CENTER] = True

    if not raw.valid[HEAD]:
        face = [j for j in RAW_FACE_JOINTS if raw.valid[j]]
        if face:
            xy[HEAD] = raw.xy[face].mean(axis=0)
            valid[HEAD] = True

    return Skeleton15(xy, valid)


def object_pseudo_skeleton(box: DetectionBox) -> Skeleton15:
    """Skeleton stand-in for a non-human object: all joints at the box center."""
    xy = np.tile(box.center(), (NUM_JOINTS, 1))
    return Skeleton15(xy, np.ones(NUM_JOINTS, dtype=bool))


def filter_by_box(skel: Skeleton15, box: DetectionBox) -> bool:
    """True iff the head and every valid torso joint lie inside the box.

    Invalid joints are skipped, so an all-invalid torso passes on head-only
    evidence (absent part centroids down-weight such frames downstream).
    """
    checked = [HEAD] + list(PART_JOINTS[TORSO])
    for j in dict.fromkeys(checked):
        if skel.valid[j] and not box.contains(skel.xy[j]):
            return False
    return True


def part_centroid(skel: Skeleton15, part: int) -> np.ndarray | None:
    """Mean position of the part's valid joints; None if none is valid."""
    joints = list(PART_JOINTS[part])
    mask = skel.valid[joints]
    if not mask.any():
        return None
    return skel.xy[joints][mask].mean(axis=0)


def box_overlap(a: DetectionBox, b: DetectionBox) -> float:
    """Intersection area over union area of two boxes."""
    ix = max(0.0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0.0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union > 0 else 0.0


def track_people(
    frames: list,
    iou_threshold: float = 0.3,
    frame_rate: float = 30.0,
    apply_box_filter: bool = True,
) -> list:
    """Associate per-frame detections into identity-stable sequences.

    ``frames`` is a list (one entry per frame) of lists of Detection. Greedy
    matching by maximal box overlap against the previous frame's boxes;
    matches below ``iou_threshold`` open new identities. Ties break toward
    larger overlap, then lower existing id, then input order. Deterministic
    for a fixed input ordering.

    Human detections are converted with :func:`convert_pose` and, when
    ``apply_box_filter``, skeletons failing :func:`filter_by_box` are replaced
    by all-invalid ones for that frame.
    """
    next_id = 0
    last_box: dict[int, DetectionBox] = {}
    last_seen: dict[int, int] = {}
    is_object: dict[int, bool] = {}
    entries: dict[int, dict[int, tuple]] = {}

    for t, dets in enumerate(frames):
        candidates = []
        for d_idx, det in enumerate(dets):
            for tid, prev in last_box.items():
                if last_seen[tid] != t - 1:
                    continue
                ov = box_overlap(det.box, prev)
                if ov >= iou_threshold:
                    candidates.append((-ov, tid, d_idx))
        candidates.sort()

        assigned_det: dict[int, int] = {}
        used_tracks = set()
        for neg_ov, tid, d_idx in candidates:
            if tid in used_tracks or d_idx in assigned_det:
                continue
            assigned_det[d_idx] = tid
            used_tracks.add(tid)

        for d_idx, det in enumerate(dets):
            tid = assigned_det.get(d_idx)
            if tid is None:
                tid = next_id
                next_id += 1
                entries[tid] = {}
                is_object[tid] = det.is_object

            if det.is_object:
                skel = object_pseudo_skeleton(det.box)
            else:
                skel = convert_pose(det.pose)
                if apply_box_filter and not filter_by_box(skel, det.box):
                    skel = Skeleton15.all_invalid()
            skel.person_id = tid
            entries[tid][t] = (skel, det.box)
            last_box[tid] = det.box
            last_seen[tid] = t

    num_frames = len(frames)
    sequences = []
    for tid in sorted(entries):
        seen = entries[tid]
        filled = []
        known_frames = sorted(seen)
        for t in range(num_frames):
            if t in seen:
                filled.append(seen[t])
            else:
                # Carry the nearest known box so the frame slot stays well-formed.
                nearest = min(known_frames, key=lambda k: (abs(k - t), k))
                filled.append((Skeleton15.all_invalid(tid), seen[nearest][1]))
        sequences.append(
            TrackedSequence(tid, filled, frame_rate=frame_rate, is_object=is_object[tid])
        )
    return sequences


def interpolate_missing(seq: TrackedSequence, l_max: int = 10) -> TrackedSequence:
    """Fill short gaps in each joint track by linear interpolation.

    A run of at most ``l_max`` consecutive invalid frames bounded by valid
    frames on both sides is filled with (1 - s) * start + s * end at gap
    fraction s; filled joints are marked valid with interpolated provenance.
    Longer runs and runs touching the clip boundary stay invalid. Originally
    valid coordinates are never altered.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    T = len(seq.frames)
    xy = np.stack([s.xy for s, _ in seq.frames])  # (T, 15, 2)
    valid = np.stack([s.valid for s, _ in seq.frames])  # (T, 15)
    interp = np.stack([s.interpolated for s, _ in seq.frames])

    for j in range(NUM_JOINTS):
        t = 0
        while t < T:
            if valid[t, j]:
                t += 1
                continue
            run_start = t
            while t < T and not valid[t, j]:
                t += 1
            run_end = t  # first valid frame after the run, or T
            gap = run_end - run_start
            if run_start == 0 or run_end == T or gap > l_max:
                continue
            start = xy[run_start - 1, j]
            end = xy[run_end, j]
            for k in range(gap):
                s = (k + 1) / (gap + 1)
                xy[run_start + k, j] = (1.0 - s) * start + s * end
                valid[run_start + k, j] = True
                interp[run_start + k, j] = True

    new_frames = [
        (Skeleton15(xy[t], valid[t], seq.person_id, interp[t]), box)
        for t, (_, box) in enumerate(seq.frames)
    ]
    return TrackedSequence(seq.person_id, new_frames, seq.frame_rate, seq.is_object)
