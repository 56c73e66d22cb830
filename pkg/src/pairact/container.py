"""Deterministic on-disk container for named float arrays plus JSON metadata.

Plain ``np.savez`` stamps zip entries with the current time, so identical
content produces different bytes on each run. Checkpoints, codebooks and
embedding tables must be byte-identical for identical inputs, so this module
writes the same zip layout with a fixed timestamp and sorted entry order.
Files remain readable with ``np.load``.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

META_KEY = "__meta__.json"
_FIXED_DATE = (1980, 1, 1, 0, 0, 0)


def save_arrays(path, arrays: dict, meta: dict | None = None) -> None:
    """Write ``arrays`` (name -> ndarray) and ``meta`` to ``path`` deterministically."""
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        if meta is not None:
            info = zipfile.ZipInfo(META_KEY, date_time=_FIXED_DATE)
            zf.writestr(info, json.dumps(meta, sort_keys=True, indent=1))
        for name in sorted(arrays):
            buf = io.BytesIO()
            np.save(buf, np.ascontiguousarray(arrays[name]), allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=_FIXED_DATE)
            zf.writestr(info, buf.getvalue())


def load_arrays(path) -> tuple[dict, dict]:
    """Read back (arrays, meta) written by :func:`save_arrays`."""
    arrays: dict[str, np.ndarray] = {}
    meta: dict = {}
    with zipfile.ZipFile(path, "r") as zf:
        for name in zf.namelist():
            data = zf.read(name)
            if name == META_KEY:
                meta = json.loads(data.decode())
            elif name.endswith(".npy"):
                arrays[name[: -len(".npy")]] = np.load(io.BytesIO(data), allow_pickle=False)
    return arrays, meta
