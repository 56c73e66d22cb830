"""Full-body co-occurrence descriptor.

Each tracked object contributes one sub-volume per time step: its appearance
vectors over the step averaged into a single vector, plus its displacement
and mean position. Sub-volume vectors are quantized against a k-means
codebook; every ordered pair of co-present sub-volumes then scores into cell
(codeword_i, codeword_j) of a cumulative K-by-K matrix, weighted by the
pair's share of the step's motion and spatial spread.

The codebook is immutable after fitting and safe to share across threads;
matrix updates are single-writer per clip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .container import load_arrays, save_arrays

CODEBOOK_FORMAT_VERSION = 1

DEFAULT_PSI = math.e  # exact codeword matches then score 1 rather than 0
DISTANCE_FLOOR = 1e-6


@dataclass
class SubVolume:
    """One object's appearance and motion over a single time step."""

    f: np.ndarray  # (D,) segment-averaged appearance
    dx: float
    dy: float
    cx: float
    cy: float
    object_id: int = -1
    segment: int = -1
    k: int = -1  # codeword index, set on first matrix update

    @property
    def motion(self) -> float:
        return math.hypot(self.dx, self.dy)

    def center(self) -> np.ndarray:
        return np.array([self.cx, self.cy])


@dataclass
class Codebook:
    centroids: np.ndarray  # (K, D)
    seed: int
    sse_history: list = field(default_factory=list, repr=False)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def save(self, path) -> None:
        save_arrays(
            path,
            {"centroids": self.centroids},
            meta={
                "format": "codebook",
                "version": CODEBOOK_FORMAT_VERSION,
                "k": self.k,
                "dim": self.dim,
                "seed": self.seed,
            },
        )

    @classmethod
    def load(cls, path) -> "Codebook":
        arrays, meta = load_arrays(path)
        if meta.get("format") != "codebook":
            raise ValueError(f"{path}: not a codebook file")
        if meta.get("version") != CODEBOOK_FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported codebook version {meta.get('version')}")
        return cls(arrays["centroids"], seed=int(meta["seed"]))


def build_subvolume(
    frame_vectors, positions, segment: int = -1, object_id: int = -1
) -> SubVolume:
    """Average per-frame vectors and positions of one object over a step."""
    vecs = np.asarray(frame_vectors, dtype=np.float64)
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    if vecs.ndim == 1:
        vecs = vecs[None, :]
    if len(vecs) == 0 or len(pos) == 0:
        raise ValueError("sub-volume needs at least one frame")
    f = vecs.mean(axis=0)
    dx, dy = pos[-1] - pos[0]
    cx, cy = pos.mean(axis=0)
    return SubVolume(f, float(dx), float(dy), float(cx), float(cy), object_id, segment)


def _sse(samples: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    return float(((samples - centroids[labels]) ** 2).sum())


def _assign_all(samples: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((samples[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)  # ties resolve to the lowest index


def kmeans_fit(samples, k: int, max_iter: int = 100, seed: int = 0) -> Codebook:
    """Fit a codebook with k-means++ seeding and Lloyd iterations.

    Deterministic for a fixed seed and sample order. Clusters that empty out
    are re-seeded to the sample farthest from its assigned centroid. The
    per-iteration within-cluster SSE trace is kept on the returned codebook.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < k:
        raise ValueError(f"need at least {k} samples to fit {k} clusters, got {n}")
    rng = np.random.default_rng(seed)

    # k-means++ seeding
    centroids = np.empty((k, samples.shape[1]))
    centroids[0] = samples[rng.integers(n)]
    d2 = ((samples - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centroids[c] = samples[idx]
        d2 = np.minimum(d2, ((samples - centroids[c]) ** 2).sum(axis=1))

    labels = np.full(n, -1)
    history = []
    for _ in range(max_iter):
        new_labels = _assign_all(samples, centroids)
        history.append(_sse(samples, centroids, new_labels))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = samples[labels == c]
            if len(members) > 0:
                centroids[c] = members.mean(axis=0)
            else:
                farthest = int(np.argmax(((samples - centroids[labels]) ** 2).sum(axis=1)))
                centroids[c] = samples[farthest]
                labels[farthest] = c

    cb = Codebook(centroids, seed=seed)
    cb.sse_history = history
    return cb


def assign(cb: Codebook, f) -> int:
    """Index of the nearest centroid; ties go to the lowest index."""
    f = np.asarray(f, dtype=np.float64)
    return int(np.argmin(((cb.centroids - f) ** 2).sum(axis=1)))


def pair_distance(a: SubVolume, b: SubVolume) -> float:
    """Spatial distance between two sub-volume centers."""
    return math.hypot(a.cx - b.cx, a.cy - b.cy)


def global_distance(subvols) -> float:
    """Half the sum of center distances over all ordered pairs in a step."""
    if len(subvols) < 2:
        raise ValueError("global distance needs at least two sub-volumes")
    total = 0.0
    for i, a in enumerate(subvols):
        for j, b in enumerate(subvols):
            if i != j:
                total += pair_distance(a, b)
    return total / 2.0


def pair_score(f_i, w_i, f_j, w_j, psi: float = DEFAULT_PSI) -> float:
    """Quantization-quality score of a sub-volume pair.

    log of the mean distance between each feature and its codeword, offset
    by psi. Symmetric in its two (feature, centroid) arguments.
    """
    if psi <= 0:
        raise ValueError("psi must be positive")
    qi = float(np.linalg.norm(np.asarray(w_i, dtype=float) - np.asarray(f_i, dtype=float)))
    qj = float(np.linalg.norm(np.asarray(w_j, dtype=float) - np.asarray(f_j, dtype=float)))
    return math.log((qi + qj) / 2.0 + psi)


@dataclass
class CoocMatrix:
    """Cumulative co-occurrence descriptor.

    ``raw`` holds the running sum of pair terms; ``terms`` counts them. The
    normalized descriptor (raw / terms) is produced by :meth:`normalized`,
    so accumulation stays exactly cumulative across steps.
    """

    raw: np.ndarray  # (K, K)
    terms: int = 0

    @classmethod
    def empty(cls, k: int) -> "CoocMatrix":
        return cls(np.zeros((k, k)))

    def normalized(self) -> np.ndarray:
        if self.terms == 0:
            return np.zeros_like(self.raw)
        return self.raw / self.terms


def update_matrix(
    m: CoocMatrix,
    subvols,
    cb: Codebook,
    psi: float = DEFAULT_PSI,
    eps: float = DISTANCE_FLOOR,
) -> CoocMatrix:
    """Accumulate one step's sub-volume pairs into the descriptor.

    For each ordered pair (i, j): cell (k_i, k_j) gains
    (motion_i / total_motion) * (global_distance / pair_distance) *
    pair_score, with total motion and pair distances floored at ``eps``.
    Codeword indices are assigned here and stored on the sub-volumes.
    Mutates and returns ``m``.
    """
    subvols = list(subvols)
    if len(subvols) < 2:
        raise ValueError("matrix update needs at least two sub-volumes in the step")
    for sv in subvols:
        sv.k = assign(cb, sv.f)
    r = global_distance(subvols)
    motion_total = max(sum(sv.motion for sv in subvols), eps)
    for i, a in enumerate(subvols):
        for j, b in enumerate(subvols):
            if i == j:
                continue
            dist = max(pair_distance(a, b), eps)
            score = pair_score(a.f, cb.centroids[a.k], b.f, cb.centroids[b.k], psi)
            m.raw[a.k, b.k] += (a.motion / motion_total) * (r / dist) * score
            m.terms += 1
    return m
