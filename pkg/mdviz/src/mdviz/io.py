"""Standalone reader for ``MDKIT1`` field dumps.

A dump is one ASCII header line

    MDKIT1 {json}\n

followed by a raw binary payload.  The JSON records the field name,
component count, grid shape ``n`` and per-axis ``bounds``, the simulation
time, the two scaling parameters ``epsilon`` and ``delta``, the payload
``endianness`` (always ``little``), and the ``dtype`` (``complex128`` or
``float64``).  The payload is little-endian IEEE float64, complex fields
stored as (re, im) pairs, with the component index varying fastest and the
third grid axis next-fastest.

This module parses those files from the byte layout alone; it has no
dependency on the package that writes them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"MDKIT1"

_DTYPES = {"complex128": "<c16", "float64": "<f8"}


@dataclass(frozen=True)
class DumpRecord:
    """One parsed field dump: header metadata plus the field array.

    ``data`` has shape ``(components,) + n`` with the grid axes in
    ``(x1, x2, x3)`` order; ``header`` keeps the raw parsed JSON so the
    record can be re-serialized byte-for-byte.
    """

    name: str
    n: tuple[int, int, int]
    bounds: tuple[tuple[float, float], ...]
    time: float
    epsilon: float
    delta: float
    dtype: str
    header: dict
    data: np.ndarray

    @property
    def components(self) -> int:
        return self.data.shape[0]


def _header_field(header: dict, key: str, path: Path):
    try:
        return header[key]
    except KeyError:
        raise ValueError(f"{path}: header is missing the {key!r} field") from None


def load_dump(path) -> DumpRecord:
    """Parse a field dump, validating the payload byte count.

    Raises ValueError on a bad magic line, an unsupported dtype or
    endianness, a missing header field, or a payload whose length does
    not match the header.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        line = fh.readline()
        if not line.startswith(MAGIC + b" "):
            raise ValueError(f"{path} is not a field dump (bad magic)")
        try:
            header = json.loads(line[len(MAGIC) + 1 :])
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: header is not valid JSON ({exc})") from None
        payload = fh.read()

    n = tuple(int(k) for k in _header_field(header, "n", path))
    if len(n) != 3 or any(k < 1 for k in n):
        raise ValueError(f"{path}: grid shape must be three positive sizes, got {n}")
    components = int(_header_field(header, "components", path))
    if components < 1:
        raise ValueError(f"{path}: component count must be >= 1, got {components}")
    endianness = _header_field(header, "endianness", path)
    if endianness != "little":
        raise ValueError(f"{path}: unsupported endianness {endianness!r}")
    dtype = _header_field(header, "dtype", path)
    if dtype not in _DTYPES:
        raise ValueError(f"{path}: unsupported dtype {dtype!r}")

    np_dtype = np.dtype(_DTYPES[dtype])
    expected = components * n[0] * n[1] * n[2] * np_dtype.itemsize
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    values = np.frombuffer(payload, dtype=np_dtype).reshape(n + (components,))
    data = np.ascontiguousarray(np.moveaxis(values, -1, 0))

    bounds = tuple(
        tuple(float(x) for x in b) for b in _header_field(header, "bounds", path)
    )
    if len(bounds) != 3 or any(len(b) != 2 for b in bounds):
        raise ValueError(f"{path}: bounds must be three (lo, hi) pairs, got {bounds}")
    return DumpRecord(
        name=str(_header_field(header, "name", path)),
        n=n,  # type: ignore[arg-type]
        bounds=bounds,
        time=float(_header_field(header, "time", path)),
        epsilon=float(_header_field(header, "epsilon", path)),
        delta=float(_header_field(header, "delta", path)),
        dtype=dtype,
        header=header,
        data=data,
    )
