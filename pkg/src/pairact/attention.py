"""Interacting body part attention.

Each part of a person gets a weight derived from how much its distance to
the other person changed between consecutive time steps. As written, the
weight is inversely proportional to that change (parts whose relative
distance changes least weigh most); a ``proportional`` mode implements the
opposite reading. Weighted features feed the per-person sequence model.

Pure, stateless, thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import PartVectors, PatchEmbedding
from .parts import CONTACT_JOINTS, CONTACT_JOINT_PART, NUM_PARTS, PART_INDICES, TORSO
from .skeleton import Skeleton15, part_centroid

MODE_AS_WRITTEN = "as-written"
MODE_PROPORTIONAL = "proportional"

PAIRING_NEAREST = "nearest"
PAIRING_ALL_PAIRS_MEAN = "all-pairs-mean"

DEFAULT_SCALE = 1.0 / NUM_PARTS  # uniform movement then yields unit weights
DEFAULT_EPS = 1e-6
DEFAULT_CAP = 5.0


@dataclass
class PartDistances:
    """Distance from each of a person's parts to the counterpart person."""

    d: np.ndarray  # (5,) nonnegative, pixels
    absent: np.ndarray  # (5,) bool


@dataclass
class AttentionWeights:
    lam: np.ndarray  # (5,) nonnegative per-part weights
    scale: float
    capped: np.ndarray  # (5,) bool

    def most_active_part(self) -> int:
        return most_active_part(self)


def part_distance(subject: Skeleton15, other: Skeleton15) -> PartDistances:
    """Minimum centroid distance from each subject part to any part of ``other``.

    A subject part with no valid joints, or an ``other`` with no present part
    centroids, yields an absent entry.
    """
    other_centroids = [c for p in PART_INDICES if (c := part_centroid(other, p)) is not None]
    d = np.zeros(NUM_PARTS)
    absent = np.zeros(NUM_PARTS, dtype=bool)
    for i, part in enumerate(PART_INDICES):
        c = part_centroid(subject, part)
        if c is None or not other_centroids:
            absent[i] = True
            continue
        d[i] = min(float(np.linalg.norm(c - oc)) for oc in other_centroids)
    return PartDistances(d, absent)


def part_weight_raw(d_cur: PartDistances, d_prev: PartDistances) -> tuple[np.ndarray, np.ndarray]:
    """Absolute change of each part's counterpart distance across time steps.

    Returns (pw, absent); pw is zero wherever either input entry is absent.
    """
    absent = d_cur.absent | d_prev.absent
    pw = np.where(absent, 0.0, np.abs(d_cur.d - d_prev.d))
    return pw, absent


def attention(
    pw: np.ndarray,
    S: float = DEFAULT_SCALE,
    eps: float = DEFAULT_EPS,
    cap: float = DEFAULT_CAP,
    mode: str = MODE_AS_WRITTEN,
) -> AttentionWeights:
    """Per-part attention weights from raw movement values.

    Movement values are floored at ``eps`` (this also covers absent parts,
    which carry pw 0), then each weight is S * sum(pw') / pw'_p, capped at
    ``cap``. ``proportional`` mode instead uses 5 * S * pw'_p / sum(pw').
    """
    if S <= 0 or eps <= 0 or cap <= 0:
        raise ValueError("S, eps and cap must be positive")
    pw = np.asarray(pw, dtype=np.float64).reshape(NUM_PARTS)
    pw_floored = np.maximum(pw, eps)
    total = pw_floored.sum()
    if mode == MODE_AS_WRITTEN:
        raw = S * (total / pw_floored)
    elif mode == MODE_PROPORTIONAL:
        raw = NUM_PARTS * S * (pw_floored / total)
    else:
        raise ValueError(f"unknown attention mode {mode!r}")
    capped = raw > cap
    lam = np.minimum(raw, cap)
    return AttentionWeights(lam, S, capped)


def apply_attention(
    weights: AttentionWeights, v: PartVectors, a: PartVectors, pf: PatchEmbedding
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Scale motion vectors and patch embeddings by their part's weight.

    Each patch vector is scaled by the weight of the part containing its
    contact joint. Returns (wv, wa, wf).
    """
    lam = weights.lam
    wv = lam[:, None] * v.xy
    wa = lam[:, None] * a.xy
    joint_lam = np.array([lam[CONTACT_JOINT_PART[j] - 1] for j in CONTACT_JOINTS])
    wf = joint_lam[:, None] * pf.vectors
    return wv, wa, wf


def most_active_part(weights: AttentionWeights) -> int:
    """Part index (1..5) with the largest weight; ties go to the lowest index."""
    return int(np.argmax(weights.lam)) + 1


def _reference_point(skel: Skeleton15) -> np.ndarray | None:
    c = part_centroid(skel, TORSO)
    if c is not None:
        return c
    if skel.valid.any():
        return skel.xy[skel.valid].mean(axis=0)
    return None


def pair_distances(subject: Skeleton15, others: list, pairing: str = PAIRING_NEAREST) -> PartDistances:
    """Counterpart distances for a subject against one or more other persons.

    ``nearest`` measures against the other person whose torso (or, failing
    that, body) centroid is closest to the subject's; ``all-pairs-mean``
    averages the per-part distances over all others that yield any.
    """
    if not others:
        return PartDistances(np.zeros(NUM_PARTS), np.ones(NUM_PARTS, dtype=bool))
    if pairing == PAIRING_NEAREST:
        ref = _reference_point(subject)
        best = None
        if ref is not None:
            ranked = []
            for idx, other in enumerate(others):
                oref = _reference_point(other)
                if oref is not None:
                    ranked.append((float(np.linalg.norm(ref - oref)), idx))
            if ranked:
                best = others[min(ranked)[1]]
        if best is None:
            best = others[0]
        return part_distance(subject, best)
    if pairing == PAIRING_ALL_PAIRS_MEAN:
        per_other = [part_distance(subject, other) for other in others]
        d = np.zeros(NUM_PARTS)
        absent = np.zeros(NUM_PARTS, dtype=bool)
        for i in range(NUM_PARTS):
            vals = [pd.d[i] for pd in per_other if not pd.absent[i]]
            if vals:
                d[i] = float(np.mean(vals))
            else:
                absent[i] = True
        return PartDistances(d, absent)
    raise ValueError(f"unknown pairing mode {pairing!r}")
