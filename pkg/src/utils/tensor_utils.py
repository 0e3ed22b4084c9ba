"""Volumes into (1, 1, *spatial) tensors and probability maps back into masks."""

import numpy as np
import torch

from src.volume.volume import Mask, Volume


def volume_to_tensor(volume: Volume, dtype: torch.dtype = torch.float32) -> torch.Tensor:
    array = np.ascontiguousarray(volume.data, dtype=np.float64)
    return torch.from_numpy(array).to(dtype).reshape(1, 1, *volume.shape)


def threshold_to_mask(
    probabilities: torch.Tensor, threshold: float, spacing: tuple[float, ...] | None = None
) -> Mask:
    foreground = (probabilities.detach().cpu()[0, 0] >= threshold).numpy()
    return Mask(foreground, spacing=spacing)
