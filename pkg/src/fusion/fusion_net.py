import torch

from src.fusion.errors import CropShapeMismatchError
from src.fusion.fusion_dtos import FusionModelConfig, ModalitySample
from src.fusion.model_interface import SegmentationModel
from src.network.layers import PredictionHead, center_write, conv_layer, initialize_parameters
from src.network.network_dtos import ArchitectureConfig
from src.network.unet import UNetBackbone
from src.utils.tensor_utils import volume_to_tensor


class FrequencyFusionNet(SegmentationModel):
    """Backbone on the high-frequency target, shared layer over the low-frequency list.

    Every prior's shared-layer output overwrites the centered crop region of the
    backbone features, giving one fused map and one prediction per prior. All
    priors go through the same shared layer and the same head, so the parameter
    count does not depend on the number of priors.
    """

    kind = "proposed"

    def __init__(self, config: FusionModelConfig | None = None, *, seed: int = 0):
        super().__init__()
        self._config = config if config is not None else FusionModelConfig()
        architecture = self._config.architecture

        self.backbone = UNetBackbone(architecture)
        self.shared = conv_layer(architecture.dim, 1, self.backbone.out_channels, 3)
        self.head = PredictionHead(architecture, self.backbone.out_channels)

        initialize_parameters(self, seed, architecture.negative_slope)

    @property
    def architecture(self) -> ArchitectureConfig:
        return self._config.architecture

    @property
    def theta(self) -> float:
        return self._config.theta

    @property
    def config(self) -> FusionModelConfig:
        return self._config

    def fused_features(
        self, high: torch.Tensor, priors: list[torch.Tensor]
    ) -> list[torch.Tensor]:
        features = self.backbone(high)
        spatial = tuple(features.shape[2:])
        split_config = self._config.split_config
        slices = split_config.crop_slices(spatial)
        crop_shape = split_config.crop_shape(spatial)

        fused_maps = []
        for prior in priors:
            if tuple(prior.shape[2:]) != crop_shape:
                raise CropShapeMismatchError(
                    f"Prior of shape {tuple(prior.shape[2:])} does not match crop {crop_shape}",
                    expected=crop_shape,
                    actual=tuple(prior.shape[2:]),
                )
            fused_maps.append(center_write(features, self.shared(prior), slices))
        return fused_maps

    def forward(self, high: torch.Tensor, priors: list[torch.Tensor]) -> list[torch.Tensor]:
        return [self.head(fused) for fused in self.fused_features(high, priors)]

    def sample_tensors(self, sample: ModalitySample) -> tuple[torch.Tensor, list[torch.Tensor]]:
        dtype = self.parameter_dtype
        high = volume_to_tensor(sample.high_volume, dtype)
        priors = [volume_to_tensor(prior.image, dtype) for prior in sample.low_priors]
        return high, priors

    def predict_maps(self, sample: ModalitySample) -> list[torch.Tensor]:
        high, priors = self.sample_tensors(sample)
        return self(high, priors)


class BaselineUNet(SegmentationModel):
    """The same backbone fed the raw normalized target, with a single head."""

    kind = "baseline"

    def __init__(self, architecture: ArchitectureConfig | None = None, *, seed: int = 0):
        super().__init__()
        self._architecture = architecture if architecture is not None else ArchitectureConfig()

        self.backbone = UNetBackbone(self._architecture)
        self.head = PredictionHead(self._architecture, self.backbone.out_channels)

        initialize_parameters(self, seed, self._architecture.negative_slope)

    @property
    def architecture(self) -> ArchitectureConfig:
        return self._architecture

    def forward(self, volume: torch.Tensor) -> list[torch.Tensor]:
        return [self.head(self.backbone(volume))]

    def predict_maps(self, sample: ModalitySample) -> list[torch.Tensor]:
        return self(volume_to_tensor(sample.target_volume, self.parameter_dtype))
