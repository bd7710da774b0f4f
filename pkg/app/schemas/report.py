"""Report Schema."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict


class LossReport(BaseModel):
    """Component losses of one batch and how many terms fed each."""

    l_mgsm: float = 0.0
    l_geo: float = 0.0
    l_acc: float = 0.0
    l_rsr: float = 0.0
    l_total: float = 0.0
    n_mgsm: int = 0
    n_geo: int = 0
    n_acc: int = 0
    n_rsr: int = 0


class TrainingLogRecord(BaseModel):
    """One line of the training loss log."""

    model_config = ConfigDict(extra="forbid")

    epoch: int
    batch: int
    l_mgsm: float
    l_geo: float
    l_acc: float
    l_rsr: float
    l_total: float
    lr: float
    grad_norm: float


class EvaluationRecord(BaseModel):
    """Held-out pair-head quality at an evaluation epoch."""

    epoch: int
    relation_accuracy: float
    distance_mae: float
    n_pairs: int
    ordered_cells: float = 0.0
    n_cells: int = 0


class LabelRecord(BaseModel):
    """Latent label of a synthetic entity."""

    model_config = ConfigDict(extra="forbid")

    id: int
    zone: Optional[int] = None
    speed: Optional[float] = None


class ContextualEmbedding(BaseModel):
    """Exported contextual embedding of one entity."""

    id: int
    h_fused: List[float]
    h_sem: List[float]
    radius: float = 0.0


class ClassificationMetrics(BaseModel):
    """Classification Metrics Class."""

    macro_f1: float
    weighted_f1: float
    accuracy: float
    n_classes: int
    n_train: int
    n_val: int
    n_test: int


class RegressionMetrics(BaseModel):
    """Regression Metrics Class."""

    rmse: float
    mae: float
    r2: float
    mape: float
    n_train: int
    n_val: int
    n_test: int


class GradcheckReport(BaseModel):
    """Largest relative gradient error per loss."""

    errors: Dict[str, float]
    threshold: float
    n_windows: int

    @property
    def passed(self) -> bool:
        """Whether every loss stays below the threshold."""
        return all(error < self.threshold for error in self.errors.values())


class RelcheckReport(BaseModel):
    """Agreement of the relation classifier with the lattice oracle."""

    n_pairs: int
    agreement: float
    symmetry_violations: int
    mismatches: List[Tuple[str, str, int, int]] = []

    @property
    def passed(self) -> bool:
        """Full agreement and symmetry."""
        return self.agreement == 100.0 and self.symmetry_violations == 0
