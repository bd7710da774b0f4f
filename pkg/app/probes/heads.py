"""Lightweight probe heads trained on frozen features."""

import logging
from typing import Optional

import numpy as np
from sklearn.preprocessing import StandardScaler

from app.autodiff import ops
from app.autodiff.tensor import Tape, Tensor, const
from app.losses.geo import cross_entropy_rows
from app.models.params import ParamStore
from app.probes.metrics import classification_scores
from app.training.optimizer import AdamW

logger = logging.getLogger(__name__)


def _zero_store(n_features: int, n_outputs: int) -> ParamStore:
    return ParamStore(
        {
            "head.W": Tensor(
                np.zeros((n_features, n_outputs)), requires_grad=True, name="head.W"
            ),
            "head.b": Tensor(
                np.zeros((1, n_outputs)), requires_grad=True, name="head.b"
            ),
        }
    )


class _Head:
    """Zero-initialized affine head fitted with AdamW and no weight decay."""

    def __init__(self, n_outputs: int, learning_rate: float, epochs: int):
        self.n_outputs = n_outputs
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.scaler = StandardScaler()
        self.params: Optional[ParamStore] = None

    def _logits(self, x: np.ndarray) -> Tensor:
        return ops.add_bias(const(x) @ self.params["head.W"], self.params["head.b"])

    def _loss(self, x: np.ndarray, y: np.ndarray) -> Tensor:
        raise NotImplementedError

    def _score(self, x: np.ndarray, y: np.ndarray) -> float:
        """Validation score, higher is better."""
        raise NotImplementedError

    def fit(
        self, x_train: np.ndarray, y_train: np.ndarray, x_val: np.ndarray, y_val
    ) -> "_Head":
        """Full-batch training, keeping the parameters of the best validation score."""
        x_train = self.scaler.fit_transform(x_train)
        x_val = self.scaler.transform(x_val)
        self.params = _zero_store(x_train.shape[1], self.n_outputs)
        optimizer = AdamW(self.params, weight_decay=0.0)
        names = self.params.by_identity()
        best_score, best = self._score(x_val, y_val), self.params.snapshot()
        for _ in range(self.epochs):
            with Tape() as tape:
                loss = self._loss(x_train, y_train)
            grads = {names[k]: g for k, (_, g) in tape.backward(loss).items()}
            optimizer.step(grads, self.learning_rate)
            score = self._score(x_val, y_val)
            if score > best_score:
                best_score, best = score, self.params.snapshot()
        self.params.load_snapshot(best)
        logger.info(f"{type(self).__name__} best validation score {best_score:.4f}")
        return self


class LogisticProbe(_Head):
    """Multinomial logistic regression on standardized features."""

    def __init__(self, n_classes: int, learning_rate: float = 1e-2, epochs: int = 200):
        """Head with one logit per class."""
        super().__init__(n_classes, learning_rate, epochs)

    def _loss(self, x: np.ndarray, y: np.ndarray) -> Tensor:
        return ops.mean(cross_entropy_rows(self._logits(x), y))

    def _score(self, x: np.ndarray, y: np.ndarray) -> float:
        return classification_scores(y, self._logits(x).data.argmax(axis=1))[
            "macro_f1"
        ]

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Class index per row."""
        return self._logits(self.scaler.transform(x)).data.argmax(axis=1)


class LinearProbe(_Head):
    """Least-squares linear regression on standardized features and targets."""

    def __init__(self, learning_rate: float = 1e-2, epochs: int = 200):
        """Single-output head."""
        super().__init__(1, learning_rate, epochs)
        self.target_mean = 0.0
        self.target_scale = 1.0

    def _standard(self, y: np.ndarray) -> np.ndarray:
        return (np.asarray(y, dtype=np.float64) - self.target_mean) / self.target_scale

    def _loss(self, x: np.ndarray, y: np.ndarray) -> Tensor:
        error = self._logits(x) - const(self._standard(y)[:, None])
        return ops.mean(ops.multiply(error, error))

    def _score(self, x: np.ndarray, y: np.ndarray) -> float:
        error = self._logits(x).data[:, 0] - self._standard(y)
        return -float(np.mean(error**2))

    def fit(self, x_train, y_train, x_val, y_val) -> "LinearProbe":
        """Standardize targets with training statistics, then fit."""
        y_train = np.asarray(y_train, dtype=np.float64)
        self.target_mean = float(y_train.mean())
        std = float(y_train.std())
        self.target_scale = std if std > 0 else 1.0
        super().fit(x_train, y_train, x_val, y_val)
        return self

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Predictions in the original target units."""
        standard = self._logits(self.scaler.transform(x)).data[:, 0]
        return standard * self.target_scale + self.target_mean
