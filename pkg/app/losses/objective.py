"""Joint objective of one window and its batch normalization."""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from app.autodiff import ops
from app.autodiff.tensor import Tensor, const
from app.context.builder import WindowContext, WindowSample
from app.losses.acc import acc_plan, acc_window_loss, loss_acc
from app.losses.geo import loss_geo
from app.losses.mgsm import loss_mgsm, mgsm_contributors
from app.losses.rsr import loss_rsr, rsr_plan, rsr_window_loss
from app.models.transformer import DualStreamTransformer
from app.schemas.config import LossConfig
from app.schemas.report import LossReport

COMPONENTS = ("mgsm", "geo", "acc", "rsr")


@dataclass(frozen=True)
class BatchNormalizers:
    """Denominators shared by every window of a batch."""

    n_mgsm: int
    n_geo: int
    n_windows: int


@dataclass
class WindowTerms:
    """Normalized component values of one window and their contributor counts."""

    mgsm: float = 0.0
    geo: float = 0.0
    acc: float = 0.0
    rsr: float = 0.0
    n_mgsm: int = 0
    n_geo: int = 0
    n_acc: int = 0
    n_rsr: int = 0


def masked_rows(context: WindowContext, sample: WindowSample) -> Tuple[int, ...]:
    """Rows of the masked ids."""
    return tuple(context.rows(sample.masked))


def batch_normalizers(
    contexts: Sequence[WindowContext], samples: Sequence[WindowSample]
) -> BatchNormalizers:
    """Count MGSM contributors and geometry examples over a whole batch."""
    n_mgsm = sum(
        len(mgsm_contributors(c.token_keys, masked_rows(c, s)))
        for c, s in zip(contexts, samples)
    )
    n_geo = sum(2 * len(s.geo_pairs) for s in samples)
    return BatchNormalizers(n_mgsm=n_mgsm, n_geo=n_geo, n_windows=len(contexts))


def _pair_targets(
    context: WindowContext, sample: WindowSample
) -> Tuple[list, list, np.ndarray, np.ndarray]:
    rows_i, rows_j, dist, rel = [], [], [], []
    size = context.window.size
    for pair in sample.geo_pairs:
        a, b = context.row_of[pair.i], context.row_of[pair.j]
        for i, j in ((a, b), (b, a)):
            rows_i.append(i)
            rows_j.append(j)
            dist.append(pair.distance / size)
            rel.append(int(pair.relation))
    return rows_i, rows_j, np.asarray(dist), np.asarray(rel, dtype=np.int64)


def window_components(
    model: DualStreamTransformer,
    context: WindowContext,
    sample: WindowSample,
    normalizers: BatchNormalizers,
    config: LossConfig,
    training: bool = True,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[Dict[str, Tensor], WindowTerms]:
    """Unweighted shares of each component from a single forward pass.

    Components without contributors in this window are left out of the dict.
    """
    masked = masked_rows(context, sample)
    out = model.forward_window(
        context.semantic, context.geometry, masked, training=training, rng=rng
    )
    terms = WindowTerms()
    shares: Dict[str, Tensor] = {}

    contributors = mgsm_contributors(context.token_keys, masked)
    if contributors and normalizers.n_mgsm:
        predicted = model.reconstruct(ops.gather_rows(out.h_sem, contributors))
        mean = loss_mgsm(
            predicted,
            context.semantic,
            contributors,
            context.token_keys,
            config.tau_mgsm,
        )
        terms.n_mgsm = len(contributors)
        shares["mgsm"] = ops.scale(mean, terms.n_mgsm / normalizers.n_mgsm)
        terms.mgsm = shares["mgsm"].item()

    if sample.geo_pairs and normalizers.n_geo:
        rows_i, rows_j, dist, rel = _pair_targets(context, sample)
        d_hat, logits = model.predict_pair(out.h_fused, rows_i, rows_j)
        mean = loss_geo(
            d_hat, logits, dist, rel, config.alpha_topo, config.alpha_dist
        )
        terms.n_geo = len(rows_i)
        shares["geo"] = ops.scale(mean, terms.n_geo / normalizers.n_geo)
        terms.geo = shares["geo"].item()

    plan = acc_plan(
        context.groups,
        context.row_of,
        context.kinds,
        context.distances,
        masked,
        config.decay_lambda,
    )
    if plan is not None:
        shares["acc"] = loss_acc(
            [acc_window_loss(out.h_sem, plan, config.tau_acc)],
            normalizers.n_windows,
        )
        terms.acc, terms.n_acc = shares["acc"].item(), plan.size

    semivariogram = rsr_plan(
        context.groups,
        context.row_of,
        context.kinds,
        context.distances,
        sample.global_pairs,
        masked,
        config.bin_edges,
    )
    if semivariogram is not None:
        shares["rsr"] = loss_rsr(
            [rsr_window_loss(out.h_sem, semivariogram, config.delta)],
            normalizers.n_windows,
        )
        terms.rsr, terms.n_rsr = shares["rsr"].item(), semivariogram.n_groups

    return shares, terms


def weighted_total(shares: Dict[str, Tensor], config: LossConfig) -> Tensor:
    """``sum alpha_c * share_c`` over the components present."""
    total = const(0.0)
    for name in COMPONENTS:
        if name in shares:
            total = total + ops.scale(shares[name], getattr(config, f"alpha_{name}"))
    return total


def window_objective(
    model: DualStreamTransformer,
    context: WindowContext,
    sample: WindowSample,
    normalizers: BatchNormalizers,
    config: LossConfig,
    training: bool = True,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[Tensor, WindowTerms]:
    """This window's share of the weighted batch loss.

    Summing the returned tensors over the windows of a batch yields the joint
    loss; each term in ``WindowTerms`` is likewise this window's share of the
    batch-level component.
    """
    shares, terms = window_components(
        model, context, sample, normalizers, config, training=training, rng=rng
    )
    return weighted_total(shares, config), terms


def loss_joint(report: LossReport, config: LossConfig) -> float:
    """Weighted sum of the component losses."""
    return (
        config.alpha_mgsm * report.l_mgsm
        + config.alpha_geo * report.l_geo
        + config.alpha_acc * report.l_acc
        + config.alpha_rsr * report.l_rsr
    )


def combine_terms(terms: Sequence[WindowTerms], config: LossConfig) -> LossReport:
    """Batch report from per-window shares, summed in window order."""
    report = LossReport(
        l_mgsm=sum(t.mgsm for t in terms),
        l_geo=sum(t.geo for t in terms),
        l_acc=sum(t.acc for t in terms),
        l_rsr=sum(t.rsr for t in terms),
        n_mgsm=sum(t.n_mgsm for t in terms),
        n_geo=sum(t.n_geo for t in terms),
        n_acc=sum(t.n_acc for t in terms),
        n_rsr=sum(t.n_rsr for t in terms),
    )
    report.l_total = loss_joint(report, config)
    return report
