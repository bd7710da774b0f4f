"""Learnable parameters of the dual-stream transformer."""

import logging
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from app.autodiff.tensor import Tensor
from app.core.seeding import derive_rng
from app.encoders.geometry import GEOMETRY_DIM
from app.schemas.config import ModelConfig
from exceptions.exceptions import DataException

logger = logging.getLogger(__name__)

STREAMS = ("sem", "fused")
N_RELATIONS = 4

Shape = Tuple[int, int]


def parameter_shapes(
    config: ModelConfig, d_geom: int = GEOMETRY_DIM
) -> Dict[str, Shape]:
    """Ordered parameter names and shapes for a model configuration."""
    d, d_ff, d_s = config.d_model, config.d_ff, config.d_sem
    shapes: Dict[str, Shape] = {
        "proj_sem.W": (d_s, d),
        "proj_sem.b": (1, d),
        "proj_geom.W": (d_geom, d),
        "proj_geom.b": (1, d),
        "gate.W1": (2 * d, d),
        "gate.b1": (1, d),
        "gate.W2": (d, 1),
        "gate.b2": (1, 1),
        "mask_token": (1, d),
    }
    for layer in range(config.n_layers):
        prefix = f"layers.{layer}"
        for name in ("W_Q", "W_K", "W_V_sem", "W_V_fused"):
            shapes[f"{prefix}.{name}"] = (d, d)
        for stream in STREAMS:
            shapes.update(
                {
                    f"{prefix}.{stream}.W_O": (d, d),
                    f"{prefix}.{stream}.b_O": (1, d),
                    f"{prefix}.{stream}.ln1.gain": (1, d),
                    f"{prefix}.{stream}.ln1.bias": (1, d),
                    f"{prefix}.{stream}.ffn.W1": (d, d_ff),
                    f"{prefix}.{stream}.ffn.b1": (1, d_ff),
                    f"{prefix}.{stream}.ffn.W2": (d_ff, d),
                    f"{prefix}.{stream}.ffn.b2": (1, d),
                    f"{prefix}.{stream}.ln2.gain": (1, d),
                    f"{prefix}.{stream}.ln2.bias": (1, d),
                }
            )
    shapes.update(
        {
            "rec.W1": (d, d),
            "rec.b1": (1, d),
            "rec.W2": (d, d_s),
            "rec.b2": (1, d_s),
            "dist.W1": (2 * d, d),
            "dist.b1": (1, d),
            "dist.W2": (d, 1),
            "dist.b2": (1, 1),
            "topo.W1": (2 * d, d),
            "topo.b1": (1, d),
            "topo.W2": (d, N_RELATIONS),
            "topo.b2": (1, N_RELATIONS),
        }
    )
    return shapes


def is_decayed(name: str) -> bool:
    """Weight decay skips biases, the mask token and normalization parameters."""
    leaf = name.rsplit(".", 1)[-1]
    if name == "mask_token" or ".ln" in name:
        return False
    return not leaf.startswith("b")


def _fan_in(name: str, shapes: Dict[str, Shape]) -> int:
    prefix, leaf = name.rsplit(".", 1)
    if leaf.startswith("b"):
        weight = f"{prefix}.W{leaf[1:]}"
        return shapes[weight][0] if weight in shapes else shapes[name][1]
    return shapes[name][0]


class ParamStore:
    """Named parameter tensors in a fixed order."""

    def __init__(self, tensors: Dict[str, Tensor]):
        """Wrap an ordered mapping of name to tensor."""
        self._tensors = dict(tensors)

    def __getitem__(self, name: str) -> Tensor:
        """Parameter by name."""
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        """Whether a parameter exists."""
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        """Parameter names in order."""
        return iter(self._tensors)

    def __len__(self) -> int:
        """Number of parameter tensors."""
        return len(self._tensors)

    def items(self) -> List[Tuple[str, Tensor]]:
        """``(name, tensor)`` pairs in order."""
        return list(self._tensors.items())

    def names(self) -> List[str]:
        """Parameter names in order."""
        return list(self._tensors)

    def by_identity(self) -> Dict[int, str]:
        """Name per tensor object id, to map tape gradients back to names."""
        return {id(t): name for name, t in self._tensors.items()}

    def shapes(self) -> Dict[str, Shape]:
        """Shape per parameter."""
        return {name: t.shape for name, t in self._tensors.items()}

    def num_parameters(self) -> int:
        """Total scalar count."""
        return int(sum(t.data.size for t in self._tensors.values()))

    def zero_grad(self) -> None:
        """Reset every gradient accumulator."""
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def snapshot(self) -> Dict[str, np.ndarray]:
        """Copies of the parameter values."""
        return {name: t.data.copy() for name, t in self._tensors.items()}

    def load_snapshot(self, values: Dict[str, np.ndarray]) -> None:
        """Overwrite parameter values in place."""
        for name, value in values.items():
            self._tensors[name].data[...] = value

    def to_document(self) -> Dict[str, Dict]:
        """JSON form ``{name: {"shape", "data"}}`` with row-major data."""
        return {
            name: {"shape": list(t.shape), "data": t.data.reshape(-1).tolist()}
            for name, t in self._tensors.items()
        }

    @classmethod
    def from_document(
        cls, document: Dict[str, Dict], expected: Optional[Dict[str, Shape]] = None
    ) -> "ParamStore":
        """Rebuild parameters, checking names and shapes against ``expected``."""
        if expected is not None:
            missing = sorted(set(expected) - set(document))
            extra = sorted(set(document) - set(expected))
            if missing or extra:
                raise DataException(
                    f"checkpoint parameters mismatch: missing {missing}, "
                    f"unexpected {extra}"
                )
        tensors = {}
        for name in expected or document:
            entry = document[name]
            shape = tuple(entry["shape"])
            data = np.asarray(entry["data"], dtype=np.float64)
            if len(shape) != 2 or data.size != shape[0] * shape[1]:
                raise DataException(f"parameter {name} has inconsistent shape {shape}")
            if expected is not None and shape != expected[name]:
                raise DataException(
                    f"parameter {name} has shape {shape}, expected {expected[name]}"
                )
            tensors[name] = Tensor(data.reshape(shape), requires_grad=True, name=name)
        return cls(tensors)


def init_params(
    config: ModelConfig, seed: int, d_geom: int = GEOMETRY_DIM
) -> ParamStore:
    """Uniform fan-in initialization with the fixed gate bias and zero mask token."""
    rng = derive_rng(seed, "init")
    shapes = parameter_shapes(config, d_geom)
    tensors = {}
    for name, shape in shapes.items():
        if name == "gate.b2":
            value = np.full(shape, config.gate_bias)
        elif name == "mask_token":
            value = np.zeros(shape)
        elif name.endswith(".gain"):
            value = np.ones(shape)
        elif ".ln" in name:
            value = np.zeros(shape)
        else:
            bound = 1.0 / np.sqrt(_fan_in(name, shapes))
            value = rng.uniform(-bound, bound, size=shape)
        tensors[name] = Tensor(value, requires_grad=True, name=name)
    store = ParamStore(tensors)
    logger.info(
        f"Initialized {len(store)} parameter tensors "
        f"({store.num_parameters()} values)"
    )
    return store
