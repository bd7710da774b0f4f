"""AdamW with decoupled weight decay over named parameters."""

from typing import Dict, Tuple

import numpy as np

from app.models.params import ParamStore, is_decayed
from exceptions.exceptions import NumericException


def global_norm(grads: Dict[str, np.ndarray]) -> float:
    """L2 norm over every gradient entry."""
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_gradients(
    grads: Dict[str, np.ndarray], max_norm: float
) -> Tuple[Dict[str, np.ndarray], float]:
    """Rescale gradients to a global norm of at most ``max_norm``.

    Returns the clipped gradients and the norm before clipping.
    """
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return grads, norm
    factor = max_norm / norm
    return {name: g * factor for name, g in grads.items()}, norm


class AdamW:
    """Adaptive moments with weight decay applied outside the moment ratio."""

    def __init__(
        self,
        params: ParamStore,
        weight_decay: float = 0.01,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        """Zero moment buffers for every parameter."""
        self.params = params
        self.weight_decay = weight_decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(t.data) for name, t in params.items()}
        self.v = {name: np.zeros_like(t.data) for name, t in params.items()}

    def step(self, grads: Dict[str, np.ndarray], lr: float) -> None:
        """Apply one update; missing gradients count as zero."""
        for name, grad in grads.items():
            if not np.all(np.isfinite(grad)):
                raise NumericException(f"non-finite gradient for parameter {name}")
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name, tensor in self.params.items():
            grad = grads.get(name)
            if grad is None:
                grad = np.zeros_like(tensor.data)
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * grad
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * grad**2
            update = (self.m[name] / correction1) / (
                np.sqrt(self.v[name] / correction2) + self.eps
            )
            if self.weight_decay and is_decayed(name):
                update = update + self.weight_decay * tensor.data
            tensor.data -= lr * update
