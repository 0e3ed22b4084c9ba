"""Training loop, checkpoint selection and thresholded prediction."""

import logging
from collections.abc import Sequence
from typing import Literal

import numpy as np
import torch

from src.config.config import settings
from src.fusion.errors import EmptyDatasetError
from src.fusion.fusion_dtos import EpochRecord, FusionModelConfig, ModalitySample, TrainingResult
from src.fusion.fusion_net import BaselineUNet, FrequencyFusionNet
from src.fusion.model_interface import SegmentationModel
from src.metrics.errors import UndefinedMetricError
from src.metrics.seg_metrics import dice
from src.network.checkpoint import Checkpoint, apply_checkpoint, capture_checkpoint
from src.network.loss import summed_dice_loss
from src.network.optim import adam_step, build_adam
from src.utils.seeding import seed_everything
from src.utils.tensor_utils import threshold_to_mask, volume_to_tensor
from src.volume.volume import Mask

ModelKind = Literal["proposed", "baseline"]


def build_model(
    kind: ModelKind, config: FusionModelConfig | None = None, *, seed: int = 0
) -> SegmentationModel:
    config = config if config is not None else FusionModelConfig()
    if kind == "proposed":
        return FrequencyFusionNet(config, seed=seed)
    return BaselineUNet(config.architecture, seed=seed)


def restore_model(checkpoint: Checkpoint) -> SegmentationModel:
    header = checkpoint.header
    config = FusionModelConfig(
        theta=header.theta if header.theta is not None else settings.disentangle.theta,
        architecture=header.architecture,
    )
    model = build_model(header.model_kind, config, seed=header.seed)
    apply_checkpoint(model, checkpoint)
    model.eval()
    return model


def loss(model: SegmentationModel, sample: ModalitySample) -> torch.Tensor:
    """Sum of the per-head Dice losses of one sample."""
    target = volume_to_tensor(sample.mask, model.parameter_dtype)
    return summed_dice_loss(model.predict_maps(sample), target)


def predict(
    sample: ModalitySample, model: SegmentationModel, threshold: float | None = None
) -> Mask:
    """Average the head outputs and keep voxels at or above the threshold."""
    threshold = (
        threshold if threshold is not None else settings.experiments.prediction_threshold
    )
    was_training = model.training
    model.eval()
    with torch.no_grad():
        probabilities = torch.stack(model.predict_maps(sample)).mean(dim=0)
    model.train(was_training)
    return threshold_to_mask(probabilities, threshold, spacing=sample.target_volume.spacing)


def mean_dice(model: SegmentationModel, samples: Sequence[ModalitySample]) -> float:
    scores = []
    for sample in samples:
        try:
            scores.append(dice(predict(sample, model), sample.mask))
        except UndefinedMetricError:
            logging.debug(f"Dice undefined for {sample.subject_id}; skipped")
    return float(np.mean(scores)) if scores else 0.0


def train(
    train_samples: Sequence[ModalitySample],
    val_samples: Sequence[ModalitySample],
    config: FusionModelConfig | None = None,
    *,
    model_kind: ModelKind = "proposed",
    epochs: int | None = None,
    seed: int = 0,
) -> TrainingResult:
    """Train with batch size 1 and keep the parameters with the best validation Dice.

    Args:
        train_samples: Annotated training samples (visited in a seeded order per epoch)
        val_samples: Validation samples; training Dice selects the checkpoint when empty
        config: Architecture, theta and optimizer settings
        model_kind: "proposed" for the fusion network, "baseline" for the plain UNet
        epochs: Number of passes (default: settings.experiments.default_epochs)
        seed: Seeds initialization, dropout and sample order
    """
    if not train_samples:
        raise EmptyDatasetError()

    config = config if config is not None else FusionModelConfig()
    epochs = epochs if epochs is not None else settings.experiments.default_epochs
    rng = seed_everything(seed)

    model = build_model(model_kind, config, seed=seed)
    optimizer = build_adam(model.parameters(), config.optimizer)
    theta = config.theta if model_kind == "proposed" else None

    history: list[EpochRecord] = []
    best: Checkpoint | None = None
    best_epoch, best_score = 1, -np.inf
    step = 0

    for epoch in range(1, epochs + 1):
        model.train()
        losses = []
        for index in rng.permutation(len(train_samples)):
            batch_loss = loss(model, train_samples[index])
            batch_loss.backward()
            step = adam_step(optimizer)
            losses.append(batch_loss.item())

        train_dice = mean_dice(model, train_samples)
        val_dice = mean_dice(model, val_samples) if val_samples else None
        history.append(
            EpochRecord(
                epoch=epoch,
                train_loss=float(np.mean(losses)),
                train_dice=train_dice,
                val_dice=val_dice,
            )
        )

        score = val_dice if val_dice is not None else train_dice
        if score > best_score:
            best_epoch, best_score = epoch, score
            best = capture_checkpoint(
                model,
                model_kind=model_kind,
                architecture=config.architecture,
                seed=seed,
                step=step,
                theta=theta,
            )

        logging.info(
            f"[{model_kind} seed={seed}] epoch {epoch}/{epochs} loss {history[-1].train_loss:.4f} "
            f"train dice {train_dice:.4f} val dice "
            f"{'n/a' if val_dice is None else f'{val_dice:.4f}'}"
        )

    assert best is not None
    logging.info(f"Selected epoch {best_epoch} checkpoint (dice {best_score:.4f})")
    return TrainingResult(
        checkpoint=best, history=history, best_epoch=best_epoch, best_score=best_score
    )
