from abc import ABC, abstractmethod
from typing import Literal

import torch
from torch import nn

from src.fusion.fusion_dtos import ModalitySample
from src.network.network_dtos import ArchitectureConfig


class SegmentationModel(nn.Module, ABC):
    """Contract shared by the fusion network and the baseline UNet."""

    kind: Literal["proposed", "baseline"]

    @property
    @abstractmethod
    def architecture(self) -> ArchitectureConfig:
        raise NotImplementedError(
            f"architecture must be implemented in model implementation. {self.__class__.__name__}"
        )

    @property
    def theta(self) -> float | None:
        return None

    @property
    def parameter_dtype(self) -> torch.dtype:
        return next(self.parameters()).dtype

    @abstractmethod
    def predict_maps(self, sample: ModalitySample) -> list[torch.Tensor]:
        """Probability maps of shape (1, 1, *spatial), one per prediction head."""
        raise NotImplementedError(
            f"predict_maps must be implemented in model implementation. {self.__class__.__name__}"
        )
