"""Construction of the low-frequency prior list and of training samples."""

import logging
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.disentangle.disentangle import high_image, low_image, split_volume
from src.disentangle.disentangle_dtos import SplitConfig
from src.fusion.errors import MissingDonorError
from src.fusion.fusion_dtos import LowPrior, ModalitySample
from src.utils.modality import Modality
from src.volume.preprocessing import minmax_normalize, resize
from src.volume.volume import Mask, Volume


class DonorVolume(BaseModel):
    """An unannotated volume of a prior modality (no mask needed)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    modality: Modality
    donor_id: str = Field(..., min_length=1)
    volume: Volume


def _donor_low_image(donor: DonorVolume, target_shape: tuple[int, ...], config: SplitConfig) -> Volume:
    resized = resize(minmax_normalize(donor.volume), target_shape)
    return low_image(split_volume(resized, config))


def build_prior_list(
    target: Volume,
    target_modality: Modality,
    donors: Sequence[DonorVolume],
    combo: Sequence[Modality],
    theta: float,
    *,
    subject_id: str = "target",
) -> list[LowPrior]:
    """Target's own low part first, then one prior per other modality in combo order.

    Donor volumes are normalized and resized to the target shape before the
    split, so every prior has the target's crop shape. Several donors of one
    modality are averaged into a single prior.
    """
    config = SplitConfig(theta=theta)
    priors = [
        LowPrior(
            modality=target_modality,
            donor_id=subject_id,
            image=low_image(split_volume(target, config)),
        )
    ]

    for modality in combo:
        if modality == target_modality:
            continue

        modality_donors = [donor for donor in donors if donor.modality == modality]
        if not modality_donors:
            raise MissingDonorError(
                f"No donor volume supplied for prior modality {modality.display_name}",
                modality=modality.value,
            )

        images = [_donor_low_image(donor, target.shape, config) for donor in modality_donors]
        averaged = np.mean([image.data for image in images], axis=0)
        priors.append(
            LowPrior(
                modality=modality,
                donor_id="+".join(donor.donor_id for donor in modality_donors),
                image=Volume(averaged, spacing=images[0].spacing),
            )
        )

    logging.debug(
        f"Prior list for {subject_id}: {[prior.modality.value for prior in priors]}"
    )
    return priors


def build_sample(
    subject_id: str,
    target_modality: Modality,
    target_volume: Volume,
    mask: Mask,
    donors: Sequence[DonorVolume],
    combo: Sequence[Modality],
    theta: float,
) -> ModalitySample:
    normalized = minmax_normalize(target_volume)
    config = SplitConfig(theta=theta)
    return ModalitySample(
        subject_id=subject_id,
        target_id=target_modality,
        target_volume=normalized,
        high_volume=high_image(split_volume(normalized, config)),
        mask=mask,
        low_priors=build_prior_list(
            normalized, target_modality, donors, combo, theta, subject_id=subject_id
        ),
        theta=theta,
    )
