"""Self-describing binary field dumps.

Layout: one ASCII header line

    MDKIT1 {json}\n

followed by the raw payload.  The JSON carries the field name, component
count, grid shape and bounds, simulation time, the two scaling parameters,
and the payload dtype; the payload is little-endian float64, complex
fields stored as (re, im) pairs, with the component index fastest and the
third grid axis varying next-fastest.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import GridSpec

MAGIC = b"MDKIT1"


def write_dump(
    path,
    name: str,
    data: np.ndarray,
    grid: GridSpec,
    time: float,
    epsilon: float,
    delta: float,
) -> None:
    data = np.asarray(data)
    if data.shape == grid.n:
        data = data[np.newaxis]
    if data.ndim != 4 or data.shape[1:] != grid.n:
        raise ValueError(
            f"dump data must have shape (c,) + {grid.n}, got {data.shape}"
        )
    is_complex = np.iscomplexobj(data)
    header = {
        "name": name,
        "components": data.shape[0],
        "n": list(grid.n),
        "bounds": [list(b) for b in grid.bounds],
        "time": float(time),
        "epsilon": float(epsilon),
        "delta": float(delta),
        "endianness": "little",
        "dtype": "complex128" if is_complex else "float64",
    }
    payload = np.ascontiguousarray(
        np.moveaxis(data, 0, -1).astype("<c16" if is_complex else "<f8")
    )
    with open(path, "wb") as fh:
        fh.write(MAGIC + b" " + json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(payload.tobytes())


def read_dump(path) -> tuple[dict, np.ndarray]:
    """Return (header, data) with data back in (components, n1, n2, n3) order."""
    with open(path, "rb") as fh:
        line = fh.readline()
        if not line.startswith(MAGIC + b" "):
            raise ValueError(f"{path} is not a field dump (bad magic)")
        header = json.loads(line[len(MAGIC) + 1 :])
        payload = fh.read()
    n = tuple(header["n"])
    c = header["components"]
    dtype = "<c16" if header["dtype"] == "complex128" else "<f8"
    data = np.frombuffer(payload, dtype=dtype)
    expected = c * n[0] * n[1] * n[2]
    if data.size != expected:
        raise ValueError(
            f"{path}: payload has {data.size} values, header implies {expected}"
        )
    data = data.reshape(n + (c,))
    return header, np.ascontiguousarray(np.moveaxis(data, -1, 0))


def dump_path(directory, name: str, time: float) -> Path:
    """Canonical filename for a field dump at a given time."""
    stamp = f"{time:.6f}".rstrip("0").rstrip(".").replace(".", "p").replace("-", "m")
    return Path(directory) / f"{name}_t{stamp}.mdk"
