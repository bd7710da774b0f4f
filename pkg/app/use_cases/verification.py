"""Verification Use Case."""

import logging
from pathlib import Path
from typing import Dict, Optional

from app.autodiff.gradcheck import grad_check_outputs
from app.autodiff.tensor import Tensor
from app.context.builder import build_window_context, sample_window
from app.core.seeding import derive_rng
from app.encoders.semantic import SemanticEncoder
from app.geometry.oracle import oracle_relation, random_grid_shape
from app.geometry.relations import classify_relation
from app.losses.objective import (
    COMPONENTS,
    batch_normalizers,
    weighted_total,
    window_components,
)
from app.models.params import init_params
from app.models.transformer import DualStreamTransformer
from app.repositories.base import write_json
from app.schemas.config import ExperimentConfig, ModelConfig, WindowConfig
from app.schemas.context import SpatialWindow
from app.schemas.report import GradcheckReport, RelcheckReport
from app.synthcity.scene import SCENE_SIZE, random_scene
from exceptions.exceptions import CustomException, DataException

logger = logging.getLogger(__name__)

GRADCHECK_THRESHOLD = 1e-4
GRADCHECK_MODEL = ModelConfig(
    d_sem=16, d_model=8, d_ff=16, n_layers=2, n_heads=2, dropout=0.0, codebook_rows=256
)
GRADCHECK_WINDOW = WindowConfig(
    size=SCENE_SIZE,
    stride=SCENE_SIZE,
    mask_ratio=0.3,
    n_random=8,
    n_hard=4,
    n_global=16,
)
SCENE_ENTITIES = (6, 12)


class VerificationUseCase:
    """Verification Use Case Class."""

    def __init__(self, out_dir: Optional[str | Path] = None):
        """Initialize with an optional report directory."""
        self.out_dir = Path(out_dir) if out_dir is not None else None

    def _write(self, name: str, document: Dict) -> None:
        if self.out_dir is not None:
            write_json(self.out_dir / name, document)

    def gradcheck(
        self,
        config: ExperimentConfig,
        n_windows: int = 20,
        max_coords: Optional[int] = None,
    ) -> GradcheckReport:
        """Finite-difference check of every loss on random scenes.

        Each scene holds 6 to 12 entities. ``max_coords`` samples that many
        coordinates per parameter tensor; by default every coordinate is checked.
        """
        try:
            params = init_params(GRADCHECK_MODEL, config.seed)
            model = DualStreamTransformer(params, GRADCHECK_MODEL)
            encoder = SemanticEncoder(
                GRADCHECK_MODEL.d_sem, GRADCHECK_MODEL.codebook_rows, config.seed
            )
            inputs = [tensor for _, tensor in params.items()]
            errors = {name: 0.0 for name in (*COMPONENTS, "joint")}
            for index in range(n_windows):
                rng = derive_rng(config.seed, "gradcheck", index)
                low, high = SCENE_ENTITIES
                dataset = random_scene(rng, int(rng.integers(low, high + 1)))
                if not low <= len(dataset) <= high:
                    raise DataException(
                        f"gradcheck scene {index} holds {len(dataset)} entities, "
                        f"expected {low} to {high}"
                    )
                window = SpatialWindow(
                    index=index,
                    bounds=dataset.extent,
                    members=tuple(e.id for e in dataset.entities),
                )
                context = build_window_context(
                    window, dataset, encoder, GRADCHECK_WINDOW
                )
                sample = sample_window(context, GRADCHECK_WINDOW, config.seed, 0)
                normalizers = batch_normalizers([context], [sample])

                def objective(*_: Tensor, context=context, sample=sample):
                    shares, _ = window_components(
                        model,
                        context,
                        sample,
                        normalizers,
                        config.loss,
                        training=False,
                    )
                    return {**shares, "joint": weighted_total(shares, config.loss)}

                window_errors = grad_check_outputs(
                    objective,
                    inputs,
                    max_coords=max_coords,
                    rng=derive_rng(config.seed, "gradcheck-coords", index),
                    min_magnitude=1e-6,
                )
                for name, error in window_errors.items():
                    errors[name] = max(errors[name], error)
                logger.debug(f"gradcheck scene {index}: {len(dataset)} entities")
            report = GradcheckReport(
                errors=errors, threshold=GRADCHECK_THRESHOLD, n_windows=n_windows
            )
            self._write("gradcheck.json", report.model_dump(mode="json"))

        except CustomException as e:
            logger.error(f"Error occurred while checking gradients: {e.detail}")
            raise

        for name, error in errors.items():
            logger.info(f"gradcheck {name}: max relative error {error:.3e}")
        return report

    def relcheck(self, config: ExperimentConfig, n_pairs: int = 1000) -> RelcheckReport:
        """Agreement of the analytic classifier with the lattice oracle."""
        rng = derive_rng(config.seed, "relcheck")
        agree = 0
        asymmetric = 0
        mismatches = []
        for _ in range(n_pairs):
            a, b = random_grid_shape(rng), random_grid_shape(rng)
            got = classify_relation(a, b)
            expected = oracle_relation(a, b)
            if got == expected:
                agree += 1
            elif len(mismatches) < 20:
                mismatches.append(
                    (a.model_dump_json(), b.model_dump_json(), int(got), int(expected))
                )
            if classify_relation(b, a) != got:
                asymmetric += 1
        report = RelcheckReport(
            n_pairs=n_pairs,
            agreement=100.0 * agree / n_pairs if n_pairs else 100.0,
            symmetry_violations=asymmetric,
            mismatches=mismatches,
        )
        self._write("relcheck.json", report.model_dump(mode="json"))
        logger.info(
            f"relcheck: {report.agreement:.2f}% agreement over {n_pairs} pairs, "
            f"{asymmetric} symmetry violations"
        )
        return report
