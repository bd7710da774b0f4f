"""Joint objective unit tests."""

import pytest

from app.losses.objective import (
    batch_normalizers,
    combine_terms,
    loss_joint,
    weighted_total,
    window_components,
    window_objective,
)
from app.schemas.config import LossConfig
from app.schemas.report import LossReport


def test_loss_joint_default_weights():
    """Test the default component weights (1, 1, 1, 50)."""
    report = LossReport(l_mgsm=1.0, l_geo=1.0, l_acc=1.0, l_rsr=0.01)
    assert loss_joint(report, LossConfig()) == pytest.approx(3.5)


def test_batch_normalizers(scene_context, scene_sample):
    """Test geometry examples count both orders of every pair."""
    normalizers = batch_normalizers([scene_context] * 2, [scene_sample] * 2)
    assert normalizers.n_windows == 2
    assert normalizers.n_geo == 4 * len(scene_sample.geo_pairs)
    single = batch_normalizers([scene_context], [scene_sample])
    assert normalizers.n_mgsm == 2 * single.n_mgsm


def test_window_objective_matches_report(tiny_model, scene_context, scene_sample):
    """Test the differentiable total equals the weighted component report."""
    config = LossConfig()
    normalizers = batch_normalizers([scene_context], [scene_sample])
    total, terms = window_objective(
        tiny_model, scene_context, scene_sample, normalizers, config, training=False
    )
    assert terms.n_geo == normalizers.n_geo == 2 * len(scene_sample.geo_pairs)
    assert terms.geo > 0.0
    report = combine_terms([terms], config)
    assert report.l_total == pytest.approx(total.item())


def test_window_share_scales_with_batch(tiny_model, scene_context, scene_sample):
    """Test a window contributes half as much to a batch of two."""
    config = LossConfig()
    alone = batch_normalizers([scene_context], [scene_sample])
    paired = batch_normalizers([scene_context] * 2, [scene_sample] * 2)
    _, one = window_objective(
        tiny_model, scene_context, scene_sample, alone, config, training=False
    )
    _, half = window_objective(
        tiny_model, scene_context, scene_sample, paired, config, training=False
    )
    assert half.geo == pytest.approx(one.geo / 2)
    assert half.acc == pytest.approx(one.acc / 2)
    assert half.rsr == pytest.approx(one.rsr / 2)


def test_zero_weights_silence_components(tiny_model, scene_context, scene_sample):
    """Test only weighted components reach the total."""
    config = LossConfig(alpha_mgsm=0, alpha_geo=1, alpha_acc=0, alpha_rsr=0)
    normalizers = batch_normalizers([scene_context], [scene_sample])
    total, terms = window_objective(
        tiny_model, scene_context, scene_sample, normalizers, config, training=False
    )
    assert total.item() == pytest.approx(terms.geo)


def test_window_components_share_one_forward(tiny_model, scene_context, scene_sample):
    """Test the component shares weight up to the window objective."""
    config = LossConfig()
    normalizers = batch_normalizers([scene_context], [scene_sample])
    shares, terms = window_components(
        tiny_model, scene_context, scene_sample, normalizers, config, training=False
    )
    total, _ = window_objective(
        tiny_model, scene_context, scene_sample, normalizers, config, training=False
    )
    assert set(shares) <= {"mgsm", "geo", "acc", "rsr"}
    assert shares["geo"].item() == pytest.approx(terms.geo)
    assert weighted_total(shares, config).item() == total.item()
