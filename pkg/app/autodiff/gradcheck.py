"""Finite-difference gradient verification."""

import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from app.autodiff.tensor import Tape, Tensor
from exceptions.exceptions import ShapeException

logger = logging.getLogger(__name__)


def relative_error(analytic: float, numeric: float) -> float:
    """``|a - n| / max(1e-8, |a| + |n|)``."""
    return abs(analytic - numeric) / max(1e-8, abs(analytic) + abs(numeric))


def grad_check_outputs(
    function: Callable[..., Dict[str, Tensor]],
    inputs: Sequence[Tensor],
    eps: float = 1e-5,
    max_coords: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    min_magnitude: float = 0.0,
) -> Dict[str, float]:
    """Largest relative error per named scalar output of ``function``.

    Every output is differentiated from one recorded forward pass, and each
    perturbed evaluation serves all outputs at once.

    **Parameters**

    * `function`: Function of ``inputs`` returning named 1x1 tensors
    * `inputs`: Tensors to differentiate; each must require gradients
    * `eps`: Finite-difference step
    * `max_coords`: Check at most this many coordinates per input, sampled
    * `min_magnitude`: Skip coordinates where both gradients are below this
    """
    for tensor in inputs:
        if not tensor.requires_grad:
            raise ValueError("grad_check inputs must require gradients")
    analytic: Dict[str, List[np.ndarray]] = {}
    with Tape() as tape:
        outputs = function(*inputs)
        for name, output in outputs.items():
            if output.shape != (1, 1):
                raise ShapeException("grad_check", output.shape, (1, 1))
            tape.backward(output)
            analytic[name] = [tape.grad(tensor).copy() for tensor in inputs]
    rng = rng or np.random.default_rng(0)

    worst = {name: 0.0 for name in analytic}
    for position, tensor in enumerate(inputs):
        flat = tensor.data.reshape(-1)
        coords = np.arange(flat.size)
        if max_coords is not None and flat.size > max_coords:
            coords = np.sort(rng.choice(flat.size, size=max_coords, replace=False))
        for idx in coords:
            original = flat[idx]
            flat[idx] = original + eps
            upper = {k: v.item() for k, v in function(*inputs).items()}
            flat[idx] = original - eps
            lower = {k: v.item() for k, v in function(*inputs).items()}
            flat[idx] = original
            for name in worst:
                numeric = (upper[name] - lower[name]) / (2.0 * eps)
                exact = float(analytic[name][position].reshape(-1)[idx])
                if abs(exact) < min_magnitude and abs(numeric) < min_magnitude:
                    continue
                worst[name] = max(worst[name], relative_error(exact, numeric))
    for name, error in worst.items():
        logger.debug(f"grad_check {name}: max relative error {error:.3e}")
    return worst


def grad_check(
    function: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    eps: float = 1e-5,
    max_coords: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    min_magnitude: float = 0.0,
) -> float:
    """Largest relative error between tape gradients and central differences."""
    return grad_check_outputs(
        lambda *tensors: {"value": function(*tensors)},
        inputs,
        eps=eps,
        max_coords=max_coords,
        rng=rng,
        min_magnitude=min_magnitude,
    )["value"]
