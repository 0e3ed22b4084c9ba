"""Checkpoints: a JSON descriptor plus a raw little-endian float32 parameter blob."""

import logging
from pathlib import Path
from typing import Literal

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, ValidationError
from torch import nn

from src.network.errors import CheckpointError
from src.network.network_dtos import ArchitectureConfig, CheckpointHeader

HEADER_SUFFIX = ".json"
BLOB_SUFFIX = ".bin"


class Checkpoint(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    header: CheckpointHeader
    state: dict[str, torch.Tensor]


def capture_checkpoint(
    model: nn.Module,
    *,
    model_kind: Literal["proposed", "baseline"],
    architecture: ArchitectureConfig,
    seed: int,
    step: int,
    theta: float | None = None,
) -> Checkpoint:
    state = {
        name: tensor.detach().cpu().clone() for name, tensor in model.state_dict().items()
    }
    header = CheckpointHeader(
        model_kind=model_kind,
        architecture=architecture,
        theta=theta,
        seed=seed,
        step=step,
        parameter_names=list(state),
        parameter_shapes=[list(tensor.shape) for tensor in state.values()],
    )
    return Checkpoint(header=header, state=state)


def apply_checkpoint(model: nn.Module, checkpoint: Checkpoint) -> None:
    try:
        model.load_state_dict(
            {
                name: tensor.to(next(iter(model.parameters())).dtype)
                for name, tensor in checkpoint.state.items()
            }
        )
    except RuntimeError as e:
        raise CheckpointError(f"Checkpoint does not fit the model: {e}") from e


def save_checkpoint(checkpoint: Checkpoint, path: str | Path) -> Path:
    """Write ``<path>.json`` and ``<path>.bin``; returns the descriptor path."""
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)

    blob = b"".join(
        np.ascontiguousarray(tensor.numpy(), dtype="<f4").tobytes()
        for tensor in checkpoint.state.values()
    )
    header_path = base.with_name(base.name + HEADER_SUFFIX)
    base.with_name(base.name + BLOB_SUFFIX).write_bytes(blob)
    header_path.write_text(checkpoint.header.model_dump_json(indent=2))

    logging.info(f"Checkpoint saved to {header_path} (step {checkpoint.header.step})")
    return header_path


def load_checkpoint(path: str | Path) -> Checkpoint:
    base = Path(path)
    if base.suffix == HEADER_SUFFIX:
        base = base.with_suffix("")
    header_path = base.with_name(base.name + HEADER_SUFFIX)
    blob_path = base.with_name(base.name + BLOB_SUFFIX)

    if not header_path.exists() or not blob_path.exists():
        raise CheckpointError("Checkpoint files not found", path=str(base))

    try:
        header = CheckpointHeader.model_validate_json(header_path.read_text())
    except ValidationError as e:
        raise CheckpointError(f"Invalid checkpoint descriptor: {e}", path=str(header_path)) from e

    values = np.frombuffer(blob_path.read_bytes(), dtype="<f4")
    expected = sum(int(np.prod(shape)) for shape in header.parameter_shapes)
    if values.size != expected:
        raise CheckpointError(
            f"Blob holds {values.size} values, descriptor expects {expected}",
            path=str(blob_path),
        )

    state: dict[str, torch.Tensor] = {}
    offset = 0
    for name, shape in zip(header.parameter_names, header.parameter_shapes, strict=True):
        count = int(np.prod(shape))
        state[name] = torch.from_numpy(values[offset : offset + count].copy()).reshape(shape)
        offset += count

    return Checkpoint(header=header, state=state)
