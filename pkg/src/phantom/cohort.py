"""Cohort generation on disk: stratified train/val/test splits plus a JSON manifest."""

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.config.config import settings
from src.phantom.errors import CohortTooSmallError, PhantomError
from src.phantom.phantom import generate_subject
from src.phantom.phantom_dtos import (
    SPLIT_NAMES,
    CohortManifest,
    DiagnosticClass,
    LoadedSubject,
    PhantomSpec,
    SplitName,
    SubjectEntry,
)
from src.utils.seeding import derive_seed
from src.volume.rvol_io import read_mask, read_volume, write_rvol

MANIFEST_NAME = "manifest.json"
MASK_NAME = "mask"
_RATIO_TOLERANCE = 1e-6
_CLASS_STREAM = 1
_SPLIT_STREAM = 2


def largest_remainder(total: int, weights: Sequence[float]) -> list[int]:
    """Integer counts summing to ``total`` proportional to ``weights``.

    Leftover units go to the largest fractional parts, earlier entries first on ties.
    """
    weights = np.asarray(weights, dtype=np.float64)
    quotas = total * weights / weights.sum()
    counts = np.floor(quotas + 1e-9).astype(int)
    remainders = quotas - counts
    leftover = total - int(counts.sum())
    by_remainder = sorted(range(len(counts)), key=lambda i: (-remainders[i], i))
    for index in by_remainder[:leftover]:
        counts[index] += 1
    return [int(count) for count in counts]


def split_sizes(n_subjects: int, split_ratios: Sequence[float]) -> tuple[int, int, int]:
    if len(split_ratios) != len(SPLIT_NAMES) or any(ratio < 0 for ratio in split_ratios):
        raise PhantomError(f"Expected three non-negative split ratios, got {split_ratios}")
    if abs(sum(split_ratios) - 1.0) > _RATIO_TOLERANCE:
        raise PhantomError(f"Split ratios must sum to 1, got {sum(split_ratios)}")

    sizes = largest_remainder(n_subjects, split_ratios)
    for name, ratio, size in zip(SPLIT_NAMES, split_ratios, sizes, strict=True):
        if ratio > 0 and size == 0:
            raise CohortTooSmallError(
                f"{n_subjects} subjects leave the {name} split empty", n_subjects=n_subjects
            )
    return sizes[0], sizes[1], sizes[2]


def assign_classes(
    n_subjects: int, class_weights: dict[str, int], rng: np.random.Generator
) -> list[DiagnosticClass]:
    classes = [DiagnosticClass(name) for name in class_weights]
    counts = largest_remainder(n_subjects, list(class_weights.values()))
    labels = [label for label, count in zip(classes, counts, strict=True) for _ in range(count)]
    return [labels[index] for index in rng.permutation(n_subjects)]


def stratified_split(
    classes: Sequence[DiagnosticClass],
    split_ratios: Sequence[float],
    rng: np.random.Generator,
) -> list[SplitName]:
    """Assign splits with exact sizes while spreading every class over all splits.

    Subjects are ordered by their within-class quantile, then split labels are
    dealt in proportion to the target sizes.
    """
    n_subjects = len(classes)
    targets = split_sizes(n_subjects, split_ratios)

    quantile = np.zeros(n_subjects)
    class_order = sorted(set(classes))
    for label in class_order:
        members = [index for index, value in enumerate(classes) if value == label]
        for rank, position in enumerate(rng.permutation(len(members))):
            quantile[members[position]] = (rank + 0.5) / len(members)

    order = sorted(range(n_subjects), key=lambda i: (quantile[i], class_order.index(classes[i])))
    assigned = [0] * len(SPLIT_NAMES)
    splits: list[SplitName] = ["train"] * n_subjects
    for step, subject in enumerate(order):
        deficits = [
            target * (step + 1) / n_subjects - count
            for target, count in zip(targets, assigned, strict=True)
        ]
        chosen = int(np.argmax(deficits))
        assigned[chosen] += 1
        splits[subject] = SPLIT_NAMES[chosen]
    return splits


def subject_dir(root: Path, subject_id: str) -> Path:
    return root / subject_id


def _generate_and_write(
    spec: PhantomSpec,
    subject_id: str,
    subject_seed: int,
    diagnostic_class: DiagnosticClass,
    split: SplitName,
    root: Path,
) -> SubjectEntry:
    subject = generate_subject(spec, subject_seed, diagnostic_class, subject_id=subject_id)
    directory = subject_dir(root, subject_id)

    volumes = {}
    for modality, volume in subject.volumes.items():
        write_rvol(volume, directory / modality.value)
        volumes[modality] = f"{subject_id}/{modality.value}.rvol"
    write_rvol(subject.mask, directory / MASK_NAME)

    return SubjectEntry(
        subject_id=subject_id,
        split=split,
        diagnostic_class=diagnostic_class,
        seed=subject_seed,
        volumes=volumes,
        mask=f"{subject_id}/{MASK_NAME}.rvol",
        snr=subject.snr,
    )


def generate_cohort(
    spec: PhantomSpec,
    n_subjects: int,
    out_dir: str | Path,
    split_ratios: tuple[float, float, float] | None = None,
    *,
    workers: int | None = None,
) -> CohortManifest:
    """Generate, split and write ``n_subjects`` phantoms plus ``manifest.json``.

    Args:
        spec: Phantom specification shared by every subject
        n_subjects: Cohort size
        out_dir: Output directory (created if missing)
        split_ratios: Train/val/test ratios (default: settings.experiments.split_ratios)
        workers: Generate subjects in this many processes; output is independent of it
    """
    split_ratios = (
        split_ratios if split_ratios is not None else settings.experiments.split_ratios
    )
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)

    classes = assign_classes(
        n_subjects,
        settings.phantom.diagnostic_class_weights,
        np.random.default_rng(derive_seed(spec.seed, _CLASS_STREAM)),
    )
    splits = stratified_split(
        classes, split_ratios, np.random.default_rng(derive_seed(spec.seed, _SPLIT_STREAM))
    )
    jobs = [
        (spec, f"sub-{index + 1:03d}", index, classes[index], splits[index], root)
        for index in range(n_subjects)
    ]

    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            entries = list(executor.map(_generate_and_write, *zip(*jobs, strict=True)))
    else:
        entries = [_generate_and_write(*job) for job in jobs]

    manifest = CohortManifest(spec=spec, split_ratios=split_ratios, subjects=entries)
    (root / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2))

    sizes = {name: len(manifest.split(name)) for name in SPLIT_NAMES}
    logging.info(f"Cohort of {n_subjects} subjects written to {root}: {sizes}")
    return manifest


def manifest_path(path: str | Path) -> Path:
    path = Path(path)
    return path / MANIFEST_NAME if path.is_dir() else path


def load_manifest(path: str | Path) -> CohortManifest:
    path = manifest_path(path)
    if not path.exists():
        raise PhantomError(f"Manifest not found: {path}")
    try:
        return CohortManifest.model_validate_json(path.read_text())
    except ValidationError as e:
        raise PhantomError(f"Invalid manifest {path}: {e}") from e


def load_subject(root: str | Path, entry: SubjectEntry) -> LoadedSubject:
    root = Path(root)
    if root.is_file():
        root = root.parent
    return LoadedSubject(
        subject_id=entry.subject_id,
        split=entry.split,
        diagnostic_class=entry.diagnostic_class,
        volumes={modality: read_volume(root / path) for modality, path in entry.volumes.items()},
        mask=read_mask(root / entry.mask),
    )
