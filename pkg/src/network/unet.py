import torch
from torch import nn

from src.network.errors import ShapeMismatchError
from src.network.layers import ConvBlock, conv_layer, max_pool
from src.network.network_dtos import ArchitectureConfig


class UNetBackbone(nn.Module):
    """Encoder/decoder with skip connections, returning full-resolution features.

    Channels double per level starting from ``base_channels``; the decoder
    upsamples with nearest neighbour followed by a 3^D convolution and
    concatenates the matching encoder features.
    """

    def __init__(self, architecture: ArchitectureConfig):
        super().__init__()
        self._architecture = architecture
        dim = architecture.dim
        slope = architecture.negative_slope
        widths = [architecture.base_channels * 2**level for level in range(architecture.depth)]

        self.encoders = nn.ModuleList()
        in_channels = architecture.in_channels
        for width in widths:
            self.encoders.append(ConvBlock(dim, in_channels, width, slope))
            in_channels = width

        self.pool = max_pool(dim)
        self.upsample = nn.Upsample(scale_factor=2, mode="nearest")

        self.up_convs = nn.ModuleList()
        self.decoders = nn.ModuleList()
        for level in reversed(range(architecture.depth - 1)):
            self.up_convs.append(conv_layer(dim, widths[level + 1], widths[level], 3))
            self.decoders.append(ConvBlock(dim, 2 * widths[level], widths[level], slope))

        self.activation = nn.LeakyReLU(slope)

    @property
    def out_channels(self) -> int:
        return self._architecture.base_channels

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        divisor = self._architecture.spatial_divisor
        spatial = tuple(x.shape[2:])
        if len(spatial) != self._architecture.dim or any(
            size % divisor for size in spatial
        ):
            raise ShapeMismatchError(
                f"Spatial shape {spatial} must be {self._architecture.dim}D with sizes "
                f"divisible by {divisor}",
                actual=spatial,
            )
        if x.shape[1] != self._architecture.in_channels:
            raise ShapeMismatchError(
                f"Expected {self._architecture.in_channels} input channels, got {x.shape[1]}",
                expected=(self._architecture.in_channels,),
                actual=(x.shape[1],),
            )

        skips: list[torch.Tensor] = []
        for level, encoder in enumerate(self.encoders):
            if level > 0:
                x = self.pool(x)
            x = encoder(x)
            skips.append(x)

        x = skips.pop()
        for up_conv, decoder in zip(self.up_convs, self.decoders, strict=True):
            x = self.activation(up_conv(self.upsample(x)))
            x = decoder(torch.cat((skips.pop(), x), dim=1))

        return x
