import torch
from torch import nn

from src.network.errors import ShapeMismatchError
from src.network.network_dtos import ArchitectureConfig


def conv_layer(
    dim: int, in_channels: int, out_channels: int, kernel_size: int
) -> nn.Module:
    """Shape-preserving convolution for 2D or 3D inputs."""
    conv = nn.Conv2d if dim == 2 else nn.Conv3d
    return conv(in_channels, out_channels, kernel_size, padding=kernel_size // 2)


def max_pool(dim: int) -> nn.Module:
    return nn.MaxPool2d(2) if dim == 2 else nn.MaxPool3d(2)


class ConvBlock(nn.Module):
    """Two 3^D convolutions, each followed by a leaky ReLU."""

    def __init__(self, dim: int, in_channels: int, out_channels: int, negative_slope: float):
        super().__init__()
        self.layers = nn.Sequential(
            conv_layer(dim, in_channels, out_channels, 3),
            nn.LeakyReLU(negative_slope),
            conv_layer(dim, out_channels, out_channels, 3),
            nn.LeakyReLU(negative_slope),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.layers(x)


class PredictionHead(nn.Module):
    """1x1 conv, leaky ReLU, dropout, 1x1 conv, sigmoid."""

    def __init__(self, architecture: ArchitectureConfig, in_channels: int):
        super().__init__()
        dim = architecture.dim
        self.layers = nn.Sequential(
            conv_layer(dim, in_channels, architecture.head_channels, 1),
            nn.LeakyReLU(architecture.negative_slope),
            nn.Dropout(architecture.dropout),
            conv_layer(dim, architecture.head_channels, 1, 1),
            nn.Sigmoid(),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.layers(x)


def center_write(
    features: torch.Tensor, block: torch.Tensor, slices: tuple[slice, ...]
) -> torch.Tensor:
    """Copy of ``features`` whose spatial ``slices`` region is overwritten by ``block``.

    ``features`` is (N, C, *spatial) and ``block`` is (N, C, *crop). Gradients
    flow to ``block`` inside the region and to ``features`` outside it.
    """
    region = features[(slice(None), slice(None), *slices)]
    if region.shape != block.shape:
        raise ShapeMismatchError(
            f"Block of shape {tuple(block.shape)} cannot fill a region of shape "
            f"{tuple(region.shape)}",
            expected=tuple(region.shape),
            actual=tuple(block.shape),
        )

    fused = features.clone()
    fused[(slice(None), slice(None), *slices)] = block
    return fused


def initialize_parameters(module: nn.Module, seed: int, negative_slope: float) -> None:
    """Seeded He-uniform weights and zero biases, independent of the global RNG."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        for name, parameter in module.named_parameters():
            if name.endswith("bias"):
                nn.init.zeros_(parameter)
            else:
                nn.init.kaiming_uniform_(
                    parameter, a=negative_slope, nonlinearity="leaky_relu"
                )


def count_parameters(module: nn.Module) -> int:
    return sum(parameter.numel() for parameter in module.parameters())
