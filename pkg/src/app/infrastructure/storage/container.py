"""Binary tensor container.

Layout::

    b"TMYO" | u16 version | u32 header length | header JSON | pad | payload

The header is ``{"metadata": {...}, "tensors": {name: {dtype, shape, offset,
nbytes}}}`` serialized with sorted keys and compact separators. Offsets are
relative to the payload, which starts on a 64-byte boundary; every tensor is
64-byte aligned and tensors are laid out in name order, so saving the same
tensors twice yields identical bytes.
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path

import numpy as np

from src.app.domain.errors import ContainerIOError

logger = logging.getLogger(__name__)

MAGIC = b"TMYO"
FORMAT_VERSION = 1
ALIGNMENT = 64
SUPPORTED_DTYPES = ("<f4", "<f8", "|i1", "<i2", "<i4", "<i8")

_PREAMBLE = struct.Struct("<4sHI")


def _pad(n: int) -> int:
    return (-n) % ALIGNMENT


def _dtype_code(array: np.ndarray, name: str) -> str:
    code = array.dtype.newbyteorder("<").str if array.dtype.byteorder == ">" else array.dtype.str
    if code not in SUPPORTED_DTYPES:
        msg = f"Tensor '{name}' has unsupported dtype {array.dtype}"
        raise ContainerIOError(msg)
    return code


def encode_container(tensors: dict[str, np.ndarray], metadata: dict[str, str] | None = None) -> bytes:
    """Serialize named arrays and string metadata to container bytes."""
    manifest: dict[str, dict] = {}
    chunks: list[bytes] = []
    offset = 0
    for name in sorted(tensors):
        array = np.ascontiguousarray(tensors[name])
        code = _dtype_code(array, name)
        raw = array.astype(code, copy=False).tobytes()
        manifest[name] = {
            "dtype": code,
            "shape": list(array.shape),
            "offset": offset,
            "nbytes": len(raw),
        }
        chunks.append(raw + b"\0" * _pad(len(raw)))
        offset += len(raw) + _pad(len(raw))

    header = json.dumps(
        {"metadata": dict(sorted((metadata or {}).items())), "tensors": manifest},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    preamble = _PREAMBLE.pack(MAGIC, FORMAT_VERSION, len(header))
    head = preamble + header
    return head + b"\0" * _pad(len(head)) + b"".join(chunks)


def _unique_keys(pairs: list[tuple[str, object]]) -> dict[str, object]:
    """``json.loads`` hook that refuses repeated keys instead of keeping the last."""
    out: dict[str, object] = {}
    for key, value in pairs:
        if key in out:
            msg = f"Container header repeats the key '{key}'"
            raise ContainerIOError(msg)
        out[key] = value
    return out


def _spans(manifest: dict[str, dict], payload: int, size: int) -> list[tuple[str, int, int]]:
    """Absolute (name, start, end) of every tensor, checked for bounds and overlap."""
    spans = []
    for name, entry in manifest.items():
        try:
            offset, nbytes = int(entry["offset"]), int(entry["nbytes"])
        except (KeyError, TypeError, ValueError) as exc:
            msg = f"Manifest entry for '{name}' is malformed"
            raise ContainerIOError(msg) from exc
        if offset < 0 or nbytes < 0:
            msg = f"Tensor '{name}' has a negative offset or size"
            raise ContainerIOError(msg)
        start = payload + offset
        if start + nbytes > size or entry.get("dtype") not in SUPPORTED_DTYPES:
            msg = f"Tensor '{name}' is truncated or has an unsupported dtype"
            raise ContainerIOError(msg)
        spans.append((name, start, start + nbytes))

    ordered = sorted((s for s in spans if s[2] > s[1]), key=lambda s: s[1])
    for (prev, _, prev_end), (name, start, _) in zip(ordered, ordered[1:], strict=False):
        if start < prev_end:
            msg = f"Tensors '{prev}' and '{name}' overlap in the payload"
            raise ContainerIOError(msg)
    return spans


def decode_container(data: bytes) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Parse container bytes into (tensors, metadata).

    Raises:
        ContainerIOError: On a bad magic, an unknown version, truncation, a
            repeated header key, or tensors with negative or overlapping spans.
    """
    if len(data) < _PREAMBLE.size:
        raise ContainerIOError("Container is truncated before its header")
    magic, version, header_len = _PREAMBLE.unpack_from(data)
    if magic != MAGIC:
        msg = f"Not a TMYO container (magic {magic!r})"
        raise ContainerIOError(msg)
    if version != FORMAT_VERSION:
        msg = f"Unsupported container version {version}; expected {FORMAT_VERSION}"
        raise ContainerIOError(msg)

    header_end = _PREAMBLE.size + header_len
    try:
        text = data[_PREAMBLE.size : header_end].decode("utf-8")
        header = json.loads(text, object_pairs_hook=_unique_keys)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        msg = f"Container header is not valid JSON: {exc}"
        raise ContainerIOError(msg) from exc

    if not isinstance(header, dict) or not isinstance(header.get("tensors", {}), dict):
        raise ContainerIOError("Container header is not a manifest object")

    manifest = header.get("tensors", {})
    tensors: dict[str, np.ndarray] = {}
    for name, start, end in _spans(manifest, header_end + _pad(header_end), len(data)):
        entry = manifest[name]
        array = np.frombuffer(data[start:end], dtype=np.dtype(entry["dtype"]))
        try:
            tensors[name] = array.reshape(entry["shape"]).copy()
        except (TypeError, ValueError) as exc:
            msg = f"Tensor '{name}' payload does not match shape {entry.get('shape')}"
            raise ContainerIOError(msg) from exc
    return tensors, {str(k): str(v) for k, v in header.get("metadata", {}).items()}


def save_container(
    path: str | Path, tensors: dict[str, np.ndarray], metadata: dict[str, str] | None = None
) -> None:
    path = Path(path)
    data = encode_container(tensors, metadata)
    try:
        path.write_bytes(data)
    except OSError as exc:
        msg = f"Cannot write container {path}: {exc}"
        raise ContainerIOError(msg) from exc
    logger.info(f"💾 Wrote {len(tensors)} tensors to {path}")


def load_container(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        msg = f"Cannot read container {path}: {exc}"
        raise ContainerIOError(msg) from exc
    tensors, metadata = decode_container(data)
    logger.debug(f"Loaded {len(tensors)} tensors from {path}")
    return tensors, metadata


__all__ = [
    "ALIGNMENT",
    "FORMAT_VERSION",
    "MAGIC",
    "decode_container",
    "encode_container",
    "load_container",
    "save_container",
]
