"""Pretraining loop."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.autodiff.tensor import Tape
from app.context.builder import WindowContext, WindowSample, sample_window
from app.core.seeding import derive_rng
from app.losses.objective import (
    BatchNormalizers,
    WindowTerms,
    batch_normalizers,
    combine_terms,
    window_objective,
)
from app.models.params import ParamStore
from app.models.transformer import DualStreamTransformer
from app.repositories.checkpoint import CheckpointRepository
from app.repositories.training_log import (
    EvaluationLogRepository,
    TrainingLogRepository,
)
from app.schemas.config import ExperimentConfig
from app.schemas.report import EvaluationRecord, LossReport, TrainingLogRecord
from app.training.evaluation import evaluate_pair_heads
from app.training.optimizer import AdamW, clip_gradients
from app.training.schedule import cosine_lr
from exceptions.exceptions import NumericException

logger = logging.getLogger(__name__)

WindowResult = Tuple[Dict[str, np.ndarray], WindowTerms, float]


@dataclass
class TrainingHistory:
    """Per-batch records and held-out evaluations of a run."""

    batches: List[TrainingLogRecord] = field(default_factory=list)
    evaluations: List[EvaluationRecord] = field(default_factory=list)

    def epoch_totals(self) -> List[float]:
        """Mean joint loss per epoch."""
        totals: Dict[int, List[float]] = {}
        for record in self.batches:
            totals.setdefault(record.epoch, []).append(record.l_total)
        return [float(np.mean(totals[e])) for e in sorted(totals)]


class Trainer:
    """Batches windows, backpropagates the joint loss and steps AdamW."""

    def __init__(
        self,
        config: ExperimentConfig,
        contexts: Sequence[WindowContext],
        params: ParamStore,
        log_repository: Optional[TrainingLogRepository] = None,
        evaluation_repository: Optional[EvaluationLogRepository] = None,
        checkpoint_repository: Optional[CheckpointRepository] = None,
    ):
        """Set up the model, optimizer and optional artifact sinks."""
        self.config = config
        self.contexts = list(contexts)
        self.params = params
        self.model = DualStreamTransformer(params, config.model)
        train = config.train
        self.optimizer = AdamW(
            params, train.weight_decay, train.beta1, train.beta2, train.eps
        )
        self.log_repository = log_repository
        self.evaluation_repository = evaluation_repository
        self.checkpoint_repository = checkpoint_repository
        self.history = TrainingHistory()
        self._names = params.by_identity()

    def batches(self, epoch: int) -> List[List[int]]:
        """Consecutive chunks of this epoch's shuffled window order."""
        order = derive_rng(self.config.seed, "shuffle", epoch).permutation(
            len(self.contexts)
        )
        size = self.config.train.batch_windows
        return [order[k : k + size].tolist() for k in range(0, len(order), size)]

    def window_gradients(
        self,
        context: WindowContext,
        sample: WindowSample,
        normalizers: BatchNormalizers,
        epoch: int,
    ) -> WindowResult:
        """Parameter gradients of one window's share of the batch loss."""
        rng = derive_rng(self.config.seed, "dropout", epoch, context.window.index)
        with Tape() as tape:
            total, terms = window_objective(
                self.model,
                context,
                sample,
                normalizers,
                self.config.loss,
                training=True,
                rng=rng,
            )
        leaf_grads = tape.backward(total)
        grads = {
            self._names[key]: grad
            for key, (_, grad) in leaf_grads.items()
            if key in self._names
        }
        return grads, terms, total.item()

    def train_batch(
        self, epoch: int, batch: int, window_indices: Sequence[int], lr: float
    ) -> LossReport:
        """Forward, backward, clip and step on one batch of windows."""
        contexts = [self.contexts[k] for k in window_indices]
        samples = [
            sample_window(c, self.config.window, self.config.seed, epoch)
            for c in contexts
        ]
        normalizers = batch_normalizers(contexts, samples)

        def run(item: Tuple[WindowContext, WindowSample]) -> WindowResult:
            return self.window_gradients(item[0], item[1], normalizers, epoch)

        items = list(zip(contexts, samples))
        if self.config.train.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.train.workers) as pool:
                results = list(pool.map(run, items))
        else:
            results = [run(item) for item in items]

        grads: Dict[str, np.ndarray] = {}
        total = 0.0
        for window_grads, _, window_total in results:
            total += window_total
            for name, grad in window_grads.items():
                grads[name] = grads[name] + grad if name in grads else grad
        report = combine_terms([terms for _, terms, _ in results], self.config.loss)

        grad_norm = 0.0
        if total != 0.0:
            grads, grad_norm = clip_gradients(grads, self.config.train.grad_clip_norm)
            self.optimizer.step(grads, lr)
        record = TrainingLogRecord(
            epoch=epoch,
            batch=batch,
            l_mgsm=report.l_mgsm,
            l_geo=report.l_geo,
            l_acc=report.l_acc,
            l_rsr=report.l_rsr,
            l_total=report.l_total,
            lr=lr,
            grad_norm=grad_norm,
        )
        self.history.batches.append(record)
        if self.log_repository is not None:
            self.log_repository.append(record)
        return report

    def save_checkpoint(self, epoch: int) -> None:
        """Write the current parameters if a checkpoint sink is configured."""
        if self.checkpoint_repository is not None:
            self.checkpoint_repository.save(self.params, self.config, epoch)

    def evaluate(self, epoch: int) -> EvaluationRecord:
        """Held-out pair-head evaluation, appended to the evaluation log."""
        record = evaluate_pair_heads(
            self.model,
            self.contexts,
            self.config.window,
            self.config.seed,
            epoch,
            self.config.loss,
        )
        self.history.evaluations.append(record)
        if self.evaluation_repository is not None:
            self.evaluation_repository.append(record)
        return record

    def fit(self) -> TrainingHistory:
        """Run every epoch, checkpointing periodically and at the end.

        A numeric failure leaves the parameters untouched by the failing step,
        so they are checkpointed as the last good state before re-raising.
        """
        train = self.config.train
        for epoch in range(train.epochs):
            lr = cosine_lr(epoch, train.epochs, train.learning_rate)
            for batch, window_indices in enumerate(self.batches(epoch)):
                try:
                    self.train_batch(epoch, batch, window_indices, lr)
                except NumericException as e:
                    logger.error(f"Epoch {epoch} batch {batch}: {e.detail}")
                    self.save_checkpoint(epoch)
                    raise
            totals = self.history.epoch_totals()
            logger.info(f"Epoch {epoch + 1}/{train.epochs}: loss {totals[-1]:.6f}")
            if (epoch + 1) % train.eval_every == 0:
                self.save_checkpoint(epoch + 1)
                self.evaluate(epoch + 1)
        self.save_checkpoint(train.epochs)
        return self.history
