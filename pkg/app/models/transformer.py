"""Dual-stream spatial transformer.

One attention map per layer and head is computed from the fused stream and
applied to two value streams: the masked-semantic stream and the fused stream.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.autodiff import ops
from app.autodiff.tensor import Tensor, const
from app.models.params import STREAMS, ParamStore
from app.schemas.config import ModelConfig
from exceptions.exceptions import DataException


@dataclass
class DualStreamOutput:
    """Stream outputs, attention maps and gate values of one window."""

    h_sem: Tensor
    h_fused: Tensor
    attention: List[List[Tensor]]
    alpha: Tensor


class DualStreamTransformer:
    """Forward pass over one window of entities."""

    def __init__(self, params: ParamStore, config: ModelConfig):
        """Bind parameters and dimensions."""
        self.params = params
        self.config = config
        self.d = config.d_model
        self.d_head = config.d_model // config.n_heads

    def _activation(self, x: Tensor) -> Tensor:
        return ops.silu(x) if self.config.activation == "silu" else ops.relu(x)

    def _linear(self, x: Tensor, prefix: str, suffix: str = "") -> Tensor:
        p = self.params
        return ops.add_bias(x @ p[f"{prefix}.W{suffix}"], p[f"{prefix}.b{suffix}"])

    def _mlp(self, x: Tensor, prefix: str, activation=None) -> Tensor:
        hidden = (activation or self._activation)(self._linear(x, prefix, "1"))
        return self._linear(hidden, prefix, "2")

    def project(
        self, semantic: np.ndarray, geometry: np.ndarray
    ) -> Tuple[Tensor, Tensor]:
        """Project raw semantic and geometry embeddings to the model width."""
        return (
            self._linear(const(semantic), "proj_sem"),
            self._linear(const(geometry), "proj_geom"),
        )

    def apply_mask(self, e_sem: Tensor, masked_rows: Sequence[int]) -> Tensor:
        """Replace masked rows by the mask token."""
        n = e_sem.shape[0]
        if not masked_rows:
            return e_sem
        keep = np.ones((n, self.d))
        column = np.zeros((n, 1))
        keep[list(masked_rows)] = 0.0
        column[list(masked_rows)] = 1.0
        token = const(column) @ self.params["mask_token"]
        return ops.multiply(e_sem, const(keep)) + token

    def fuse(self, e_sem: Tensor, e_geom: Tensor) -> Tuple[Tensor, Tensor]:
        """Gate ``alpha`` and ``(1 - alpha) * e_sem + alpha * e_geom`` per row."""
        logits = self._mlp(ops.concat_cols([e_sem, e_geom]), "gate")
        alpha = ops.sigmoid(logits)
        mix = ops.multiply(ops.broadcast_rows(alpha, self.d), e_geom - e_sem)
        return e_sem + mix, alpha

    def _attention(self, source: Tensor, layer: int) -> List[Tensor]:
        p = self.params
        queries = source @ p[f"layers.{layer}.W_Q"]
        keys = source @ p[f"layers.{layer}.W_K"]
        scale = 1.0 / math.sqrt(self.d_head)
        maps = []
        for head in range(self.config.n_heads):
            lo, hi = head * self.d_head, (head + 1) * self.d_head
            scores = ops.slice_cols(queries, lo, hi) @ ops.slice_cols(keys, lo, hi).T
            maps.append(ops.softmax_rows(ops.scale(scores, scale)))
        return maps

    def _stream(
        self,
        x: Tensor,
        values: Tensor,
        maps: List[Tensor],
        prefix: str,
        training: bool,
        rng: Optional[np.random.Generator],
    ) -> Tensor:
        p = self.params
        heads = [
            maps[h] @ ops.slice_cols(values, h * self.d_head, (h + 1) * self.d_head)
            for h in range(self.config.n_heads)
        ]
        attended = self._linear(ops.concat_cols(heads), prefix, "_O")
        attended = ops.dropout(attended, self.config.dropout, rng, training)
        x = ops.layer_norm(
            x + attended, p[f"{prefix}.ln1.gain"], p[f"{prefix}.ln1.bias"]
        )
        update = self._mlp(x, f"{prefix}.ffn")
        update = ops.dropout(update, self.config.dropout, rng, training)
        return ops.layer_norm(
            x + update, p[f"{prefix}.ln2.gain"], p[f"{prefix}.ln2.bias"]
        )

    def forward_window(
        self,
        semantic: np.ndarray,
        geometry: np.ndarray,
        masked_rows: Sequence[int] = (),
        training: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> DualStreamOutput:
        """Encode a window; masked rows only ever see the mask token."""
        n = semantic.shape[0]
        if n < 1 or (training and n < 2):
            raise DataException(f"window with {n} entities is skipped")
        visible = np.array(semantic, dtype=np.float64)
        visible[list(masked_rows)] = 0.0
        e_sem, e_geom = self.project(visible, geometry)
        e_sem = self.apply_mask(e_sem, masked_rows)
        fused, alpha = self.fuse(e_sem, e_geom)

        h_sem, h_fused = e_sem, fused
        attention = []
        for layer in range(self.config.n_layers):
            maps = self._attention(h_fused, layer)
            attention.append(maps)
            p = self.params
            v_sem = h_sem @ p[f"layers.{layer}.W_V_sem"]
            v_fused = h_fused @ p[f"layers.{layer}.W_V_fused"]
            sem_prefix, fused_prefix = (f"layers.{layer}.{s}" for s in STREAMS)
            h_sem, h_fused = (
                self._stream(h_sem, v_sem, maps, sem_prefix, training, rng),
                self._stream(h_fused, v_fused, maps, fused_prefix, training, rng),
            )
        return DualStreamOutput(
            h_sem=h_sem, h_fused=h_fused, attention=attention, alpha=alpha
        )

    def reconstruct(self, h_sem_rows: Tensor) -> Tensor:
        """Predicted semantic embeddings of masked rows."""
        return self._mlp(h_sem_rows, "rec", activation=ops.relu)

    def predict_pair(
        self, h_fused: Tensor, rows_i: Sequence[int], rows_j: Sequence[int]
    ) -> Tuple[Tensor, Tensor]:
        """Normalized distance ``(k, 1)`` and relation logits ``(k, 4)`` per pair."""
        pairs = ops.concat_cols(
            [ops.gather_rows(h_fused, rows_i), ops.gather_rows(h_fused, rows_j)]
        )
        return self._mlp(pairs, "dist"), self._mlp(pairs, "topo")

    def predict_pair_symmetric(
        self, h_fused: Tensor, rows_i: Sequence[int], rows_j: Sequence[int]
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Predictions averaged over both presentation orders."""
        d_ij, r_ij = self.predict_pair(h_fused, rows_i, rows_j)
        d_ji, r_ji = self.predict_pair(h_fused, rows_j, rows_i)
        return 0.5 * (d_ij.data + d_ji.data)[:, 0], 0.5 * (r_ij.data + r_ji.data)
