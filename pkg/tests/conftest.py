"""Test configuration and fixtures for the frequency fusion segmentation package."""

from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest
import torch

from src.fusion.fusion_dtos import FusionModelConfig, ModalitySample
from src.fusion.priors import DonorVolume, build_sample
from src.network.network_dtos import ArchitectureConfig
from src.phantom.cohort import generate_cohort
from src.phantom.phantom_dtos import CohortManifest, PhantomSpec
from src.utils.modality import Modality
from src.volume.volume import Mask, Volume

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def random_mask(rng: np.random.Generator, shape: tuple[int, ...], fill: float = 0.3) -> Mask:
    """Random binary mask with at least one foreground and one background voxel."""
    data = rng.random(shape) < fill
    data.flat[0] = True
    data.flat[-1] = False
    return Mask(data)


def blob_mask(
    shape: tuple[int, ...], center: tuple[float, ...], radius: float
) -> Mask:
    """Filled disk or ball."""
    coordinates = np.indices(shape, dtype=np.float64)
    squared = sum(
        (axis - position) ** 2 for axis, position in zip(coordinates, center, strict=True)
    )
    return Mask(squared <= radius**2)


@pytest.fixture
def rng() -> np.random.Generator:
    """Provides a seeded numpy generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def small_architecture() -> ArchitectureConfig:
    """Provides a two-level UNet small enough for gradient checks."""
    return ArchitectureConfig(base_channels=2, depth=2, head_channels=2, dropout=0.1)


@pytest.fixture
def small_fusion_config(small_architecture: ArchitectureConfig) -> FusionModelConfig:
    """Provides a fusion configuration on the small architecture with theta 0.25."""
    return FusionModelConfig(theta=0.25, architecture=small_architecture)


@pytest.fixture
def sample_volume(rng: np.random.Generator) -> Volume:
    """Provides a random 16x16 volume."""
    return Volume(rng.random((16, 16)))


@pytest.fixture
def disk_sample_factory(rng: np.random.Generator):
    """Builds samples with a bright disk target and an inverted-contrast SWI donor."""

    def build(
        subject_id: str = "sub-001",
        combo: tuple[Modality, ...] = (Modality.QSM, Modality.SWI),
        theta: float = 0.25,
        shape: tuple[int, int] = (16, 16),
        radius: float = 3.0,
        offset: tuple[float, float] = (0.0, 0.0),
    ) -> ModalitySample:
        center = tuple((size - 1) / 2 + shift for size, shift in zip(shape, offset, strict=True))
        mask = blob_mask(shape, center, radius)
        target = Volume(0.2 + 0.7 * mask.data + 0.05 * rng.random(shape))
        donor = Volume(0.9 - 0.6 * mask.data + 0.05 * rng.random(shape))
        donors = [DonorVolume(modality=Modality.SWI, donor_id="sub-donor", volume=donor)]
        return build_sample(
            subject_id, Modality.QSM, target, mask, donors, list(combo), theta
        )

    return build


@pytest.fixture
def tiny_phantom_spec() -> PhantomSpec:
    """Provides a 32x32 phantom specification."""
    return PhantomSpec(shape=(32, 32), seed=11)


@pytest.fixture
def tiny_cohort(tmp_path: Path, tiny_phantom_spec: PhantomSpec) -> tuple[Path, CohortManifest]:
    """Provides a 10-subject cohort (6/2/2 split) written under tmp_path."""
    root = tmp_path / "cohort"
    manifest = generate_cohort(tiny_phantom_spec, 10, root, (0.6, 0.2, 0.2))
    return root, manifest


@pytest.fixture(autouse=True)
def restore_torch_state() -> Generator[None, None, None]:
    """Keeps the global torch RNG and determinism flag unchanged across tests."""
    rng_state = torch.random.get_rng_state()
    deterministic = torch.are_deterministic_algorithms_enabled()

    yield

    torch.random.set_rng_state(rng_state)
    torch.use_deterministic_algorithms(deterministic)
