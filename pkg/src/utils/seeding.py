"""Helpers for bit-reproducible runs."""

import numpy as np
import torch


def seed_everything(seed: int) -> np.random.Generator:
    """Seed torch's global RNG, request deterministic kernels, return a numpy Generator."""
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)
    return np.random.default_rng(seed)


def derive_seed(*parts: int) -> int:
    """Stable 32-bit seed from a tuple of integers."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])
