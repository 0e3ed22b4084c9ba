from collections.abc import Iterable

import torch

from src.network.network_dtos import OptimizerConfig


def build_adam(
    parameters: Iterable[torch.nn.Parameter], config: OptimizerConfig | None = None
) -> torch.optim.Adam:
    config = config if config is not None else OptimizerConfig()
    return torch.optim.Adam(
        parameters,
        lr=config.learning_rate,
        betas=(config.beta1, config.beta2),
        eps=config.eps,
    )


def adam_step(optimizer: torch.optim.Adam) -> int:
    """Apply one bias-corrected Adam update from the accumulated gradients.

    Gradients are cleared afterwards. Returns the step counter of the first
    parameter, which increases by exactly one per call.
    """
    optimizer.step()
    optimizer.zero_grad(set_to_none=False)
    return optimizer_step_count(optimizer)


def optimizer_step_count(optimizer: torch.optim.Adam) -> int:
    for group in optimizer.param_groups:
        for parameter in group["params"]:
            state = optimizer.state.get(parameter)
            if state and "step" in state:
                return int(state["step"])
    return 0
