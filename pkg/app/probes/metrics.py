"""Probe metrics."""

from typing import Dict

import numpy as np
from sklearn.metrics import (
    accuracy_score,
    f1_score,
    mean_absolute_error,
    mean_absolute_percentage_error,
    mean_squared_error,
    r2_score,
)


def classification_scores(y_true: np.ndarray, y_pred: np.ndarray) -> Dict[str, float]:
    """Macro-F1, weighted-F1 and accuracy, in percent."""
    return {
        "macro_f1": 100.0 * f1_score(y_true, y_pred, average="macro", zero_division=0),
        "weighted_f1": 100.0
        * f1_score(y_true, y_pred, average="weighted", zero_division=0),
        "accuracy": 100.0 * accuracy_score(y_true, y_pred),
    }


def regression_scores(y_true: np.ndarray, y_pred: np.ndarray) -> Dict[str, float]:
    """RMSE, MAE, R2 and MAPE (fraction) of a regression."""
    return {
        "rmse": float(np.sqrt(mean_squared_error(y_true, y_pred))),
        "mae": float(mean_absolute_error(y_true, y_pred)),
        "r2": float(r2_score(y_true, y_pred)),
        "mape": float(mean_absolute_percentage_error(y_true, y_pred)),
    }
