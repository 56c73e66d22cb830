"""Pluggable appearance-embedding providers.

A provider answers "what does the image look like at this joint (or over the
whole detection) in this frame" with a fixed-dimension vector. Convolutional
inference is out of scope; embeddings come from a precomputed table, a
deterministic pseudo-random stub, or a synthetic class-signal generator.

Every provider is deterministic (same query, same vector) and safe for
concurrent reads. Queries are keyed by (video id, frame, person id, joint
index); joint index ``FULL_BODY`` (-1) addresses the whole detection region
used by the co-occurrence stream.
"""

from __future__ import annotations

import hashlib
from typing import Protocol

import numpy as np

from .container import load_arrays, save_arrays

FULL_BODY = -1

TABLE_FORMAT_VERSION = 1


class MissingEmbeddingError(KeyError):
    """A required embedding key is absent from the backing table."""

    def __init__(self, video_id, frame: int, person: int, joint: int):
        self.key = (video_id, frame, person, joint)
        super().__init__(
            f"no embedding for video={video_id!r} frame={frame} person={person} joint={joint}"
        )


class EmbeddingProvider(Protocol):
    """Deterministic source of D-dimensional appearance vectors."""

    dim: int

    def query(
        self, video_id, frame: int, person: int, joint: int, center, patch_size: int
    ) -> np.ndarray: ...


def _key_seed(base_seed: int, *fields) -> int:
    """Stable 64-bit seed from a query key, independent of platform hashing."""
    text = "|".join(str(f) for f in (base_seed,) + fields)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class EmbeddingTable:
    """In-memory (video, frame, person, joint) -> vector table with file IO."""

    def __init__(self, dim: int):
        self.dim = dim
        self._data: dict[tuple, np.ndarray] = {}

    def put(self, video_id, frame: int, person: int, joint: int, vec) -> None:
        vec = np.asarray(vec, dtype=np.float64).reshape(self.dim)
        self._data[(str(video_id), int(frame), int(person), int(joint))] = vec

    def get(self, video_id, frame: int, person: int, joint: int) -> np.ndarray:
        key = (str(video_id), int(frame), int(person), int(joint))
        try:
            return self._data[key]
        except KeyError:
            raise MissingEmbeddingError(video_id, frame, person, joint) from None

    def __len__(self):
        return len(self._data)

    def save(self, path) -> None:
        keys = sorted(self._data)
        vids = np.array([k[0] for k in keys])
        idx = np.array([[k[1], k[2], k[3]] for k in keys], dtype=np.int64).reshape(-1, 3)
        vecs = np.stack([self._data[k] for k in keys]) if keys else np.zeros((0, self.dim))
        save_arrays(
            path,
            {"video_ids": vids, "indices": idx, "vectors": vecs},
            meta={"format": "embedding-table", "version": TABLE_FORMAT_VERSION, "dim": self.dim},
        )

    @classmethod
    def load(cls, path) -> "EmbeddingTable":
        arrays, meta = load_arrays(path)
        if meta.get("format") != "embedding-table":
            raise ValueError(f"{path}: not an embedding table")
        if meta.get("version") != TABLE_FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported table version {meta.get('version')}")
        table = cls(int(meta["dim"]))
        vids, idx, vecs = arrays["video_ids"], arrays["indices"], arrays["vectors"]
        for i in range(len(vids)):
            table.put(str(vids[i]), idx[i, 0], idx[i, 1], idx[i, 2], vecs[i])
        return table


class TableProvider:
    """Looks embeddings up in a precomputed :class:`EmbeddingTable`.

    Patch geometry is ignored: coordinates were fixed when the table was
    built. A missing key is a hard error naming the key.
    """

    def __init__(self, table: EmbeddingTable):
        self.table = table
        self.dim = table.dim

    def query(self, video_id, frame, person, joint, center, patch_size) -> np.ndarray:
        return self.table.get(video_id, frame, person, joint)


class StubProvider:
    """Deterministic pseudo-random vectors keyed by the full query.

    Stands in for a real patch-feature network in tests and dry runs. The
    patch center enters the key rounded to whole pixels.
    """

    def __init__(self, dim: int = 64, seed: int = 0):
        self.dim = dim
        self.seed = seed

    def query(self, video_id, frame, person, joint, center, patch_size) -> np.ndarray:
        cx, cy = (int(round(float(center[0]))), int(round(float(center[1]))))
        rng = np.random.default_rng(
            _key_seed(self.seed, video_id, frame, person, joint, patch_size, cx, cy)
        )
        return rng.standard_normal(self.dim)


class ClassSignalProvider:
    """Synthetic embeddings: a per-class mean direction plus keyed noise.

    Gives synthetic datasets a learnable appearance signal. ``video_class``
    maps video id to class index; unknown videos get a zero mean.
    """

    def __init__(
        self,
        dim: int,
        num_classes: int,
        video_class: dict,
        signal_strength: float = 1.0,
        noise: float = 0.1,
        seed: int = 0,
    ):
        self.dim = dim
        self.video_class = {str(k): int(v) for k, v in video_class.items()}
        self.signal_strength = signal_strength
        self.noise = noise
        self.seed = seed
        rng = np.random.default_rng(_key_seed(seed, "class-means"))
        means = rng.standard_normal((num_classes, dim))
        means /= np.linalg.norm(means, axis=1, keepdims=True)
        self.class_means = means

    def query(self, video_id, frame, person, joint, center, patch_size) -> np.ndarray:
        rng = np.random.default_rng(_key_seed(self.seed, video_id, frame, person, joint))
        noise = rng.standard_normal(self.dim) * self.noise
        cls = self.video_class.get(str(video_id))
        if cls is None:
            return noise
        return self.signal_strength * self.class_means[cls] + noise
