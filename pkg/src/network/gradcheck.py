"""Central finite-difference verification of analytic gradients."""

import logging
from collections.abc import Callable, Iterable

import torch

from src.config.config import settings
from src.network.network_dtos import GradCheckReport, ParameterGradCheck

_NORM_FLOOR = 1e-12


def _evaluate(closure: Callable[[], torch.Tensor], rng_seed: int) -> torch.Tensor:
    # Re-seeding before every evaluation freezes the dropout masks.
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(rng_seed)
        return closure()


def grad_check(
    tensors: Iterable[tuple[str, torch.Tensor]],
    closure: Callable[[], torch.Tensor],
    *,
    tolerance: float | None = None,
    step: float | None = None,
    max_entries_per_tensor: int | None = None,
    rng_seed: int = 0,
) -> GradCheckReport:
    """Compare autograd gradients of ``closure`` against central differences.

    Args:
        tensors: Named leaf tensors requiring grad (parameters or inputs)
        closure: Recomputes the scalar loss from the current tensor values
        tolerance: Accepted relative error (default: settings.network.gradcheck_tolerance)
        step: Perturbation size (default: settings.network.gradcheck_step)
        max_entries_per_tensor: Check a seeded random subset of entries of large tensors
        rng_seed: Seed applied before every closure evaluation
    """
    tolerance = tolerance if tolerance is not None else settings.network.gradcheck_tolerance
    step = step if step is not None else settings.network.gradcheck_step
    named_tensors = list(tensors)

    for _, tensor in named_tensors:
        tensor.grad = None
        if tensor.dtype != torch.float64:
            logging.warning("Gradient check on a non-float64 tensor; expect loose agreement")

    loss = _evaluate(closure, rng_seed)
    loss.backward()

    sampler = torch.Generator().manual_seed(rng_seed)
    results: list[ParameterGradCheck] = []
    for name, tensor in named_tensors:
        analytic = (
            tensor.grad.detach().reshape(-1).clone()
            if tensor.grad is not None
            else torch.zeros(tensor.numel(), dtype=tensor.dtype)
        )

        indices = torch.arange(tensor.numel())
        if max_entries_per_tensor is not None and tensor.numel() > max_entries_per_tensor:
            indices = torch.randperm(tensor.numel(), generator=sampler)[:max_entries_per_tensor]

        numeric = torch.zeros(len(indices), dtype=torch.float64)
        flat = tensor.data.view(-1)
        with torch.no_grad():
            for position, index in enumerate(indices.tolist()):
                original = flat[index].item()
                flat[index] = original + step
                loss_plus = _evaluate(closure, rng_seed).item()
                flat[index] = original - step
                loss_minus = _evaluate(closure, rng_seed).item()
                flat[index] = original
                numeric[position] = (loss_plus - loss_minus) / (2 * step)

        selected = analytic[indices].to(torch.float64)
        analytic_norm = float(torch.linalg.norm(selected))
        scale = max(analytic_norm, float(torch.linalg.norm(numeric)), _NORM_FLOOR)
        relative_error = float(torch.linalg.norm(selected - numeric)) / scale

        results.append(
            ParameterGradCheck(
                name=name,
                relative_error=relative_error,
                analytic_norm=analytic_norm,
                entries_checked=len(indices),
            )
        )

    report = GradCheckReport(
        parameters=results,
        max_relative_error=max((result.relative_error for result in results), default=0.0),
        tolerance=tolerance,
    )
    logging.info(
        f"Gradient check over {len(results)} tensors: max relative error "
        f"{report.max_relative_error:.3e} (tolerance {tolerance:.0e})"
    )
    return report
