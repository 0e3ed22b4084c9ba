import torch

from src.config.config import settings
from src.network.errors import ShapeMismatchError


def dice_loss(
    prediction: torch.Tensor,
    target: torch.Tensor,
    *,
    smoothing: float | None = None,
) -> torch.Tensor:
    """Soft Dice loss ``1 - (2 sum(p g) + s) / (sum(p) + sum(g) + s)``."""
    if prediction.shape != target.shape:
        raise ShapeMismatchError(
            f"Prediction {tuple(prediction.shape)} and target {tuple(target.shape)} differ",
            expected=tuple(target.shape),
            actual=tuple(prediction.shape),
        )

    smoothing = smoothing if smoothing is not None else settings.network.dice_smoothing
    target = target.to(prediction.dtype)

    intersection = torch.sum(prediction * target)
    denominator = torch.sum(prediction) + torch.sum(target)
    return 1 - (2 * intersection + smoothing) / (denominator + smoothing)


def summed_dice_loss(
    predictions: list[torch.Tensor],
    target: torch.Tensor,
    *,
    smoothing: float | None = None,
) -> torch.Tensor:
    """Sum of the per-head Dice losses against the same target."""
    if not predictions:
        raise ShapeMismatchError("At least one prediction is required")
    return torch.stack(
        [dice_loss(prediction, target, smoothing=smoothing) for prediction in predictions]
    ).sum()
