"""RVOL volume files: a JSON header (``*.rvol``) next to a raw payload (``*.raw``).

Volumes are written as little-endian float32, masks as uint8 with values {0, 1}.
"""

import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.volume.errors import InvalidVolumeError, RvolFormatError
from src.volume.volume import Mask, Volume
from src.volume.volume_dtos import RvolHeader

RVOL_SUFFIX = ".rvol"
PAYLOAD_SUFFIX = ".raw"


def rvol_path(path: str | Path) -> Path:
    path = Path(path)
    return path if path.suffix == RVOL_SUFFIX else path.with_name(path.name + RVOL_SUFFIX)


def payload_path(path: str | Path) -> Path:
    return rvol_path(path).with_suffix(PAYLOAD_SUFFIX)


def write_rvol(volume: Volume, path: str | Path) -> Path:
    """Write the header and payload; returns the header path."""
    header_path = rvol_path(path)
    header_path.parent.mkdir(parents=True, exist_ok=True)

    is_mask = isinstance(volume, Mask)
    header = RvolHeader(
        shape=list(volume.shape),
        dtype="u8" if is_mask else "f32",
        spacing=list(volume.spacing),
    )

    payload = np.ascontiguousarray(volume.data, dtype=header.numpy_dtype)
    payload_path(header_path).write_bytes(payload.tobytes(order="C"))
    header_path.write_text(header.model_dump_json(indent=2))

    logging.debug(f"Wrote {volume!r} to {header_path}")
    return header_path


def read_header(path: str | Path) -> RvolHeader:
    header_path = rvol_path(path)
    if not header_path.exists():
        raise RvolFormatError("RVOL header not found", path=str(header_path))

    try:
        return RvolHeader.model_validate_json(header_path.read_text())
    except ValidationError as e:
        raise RvolFormatError(f"Invalid RVOL header: {e}", path=str(header_path)) from e


def _read_payload(path: str | Path, header: RvolHeader) -> np.ndarray:
    data_path = payload_path(path)
    if not data_path.exists():
        raise RvolFormatError("RVOL payload not found", path=str(data_path))

    payload = np.frombuffer(data_path.read_bytes(), dtype=header.numpy_dtype)
    if payload.size != header.element_count:
        raise RvolFormatError(
            f"Payload holds {payload.size} values, header expects {header.element_count}",
            path=str(data_path),
        )
    return payload.reshape(header.shape)


def read_volume(path: str | Path) -> Volume:
    header = read_header(path)
    payload = _read_payload(path, header)
    try:
        return Volume(payload, spacing=tuple(header.spacing))
    except InvalidVolumeError as e:
        raise RvolFormatError(e.message, path=str(rvol_path(path))) from e


def read_mask(path: str | Path) -> Mask:
    header = read_header(path)
    if header.dtype != "u8":
        raise RvolFormatError(
            f"Masks must be stored as u8, got {header.dtype}", path=str(rvol_path(path))
        )
    payload = _read_payload(path, header)
    try:
        return Mask(payload, spacing=tuple(header.spacing))
    except InvalidVolumeError as e:
        raise RvolFormatError(e.message, path=str(rvol_path(path))) from e
