"""Use case unit tests."""

import inspect
import json
from unittest.mock import patch

import numpy as np
import pytest

from app.repositories.dataset import DatasetRepository
from app.repositories.embedding import EmbeddingRepository
from app.repositories.labels import LabelsRepository
from app.schemas.config import DataConfig, ProbeConfig, TrainConfig
from app.schemas.report import (
    ClassificationMetrics,
    ContextualEmbedding,
    RegressionMetrics,
)
from app.synthcity.scene import random_scene
from app.training.trainer import TrainingHistory
from app.use_cases.base import echo_config
from app.use_cases.embed import EmbedUseCase, frozen_config
from app.use_cases.pretrain import PretrainUseCase
from app.use_cases.probe import ProbeUseCase
from app.use_cases.synth import SynthUseCase
from app.use_cases.verification import VerificationUseCase
from exceptions.exceptions import DataException

################################################ Fixtures


@pytest.fixture()
def dataset_path(small_dataset, tmp_path):
    """Fixture that returns the path of the small dataset on disk."""
    path = tmp_path / "data" / "dataset.jsonl"
    DatasetRepository(path).save(small_dataset)
    return path


@pytest.fixture()
def one_epoch_config(tiny_config):
    """Fixture that returns the tiny config trained for a single epoch."""
    return tiny_config.model_copy(
        update={"train": TrainConfig(epochs=1, batch_windows=2, eval_every=1)}
    )


@pytest.fixture()
def classification_metrics():
    """Fixture that returns classification metrics."""
    return ClassificationMetrics(
        macro_f1=80.0,
        weighted_f1=82.0,
        accuracy=85.0,
        n_classes=2,
        n_train=2,
        n_val=1,
        n_test=1,
    )


@pytest.fixture()
def regression_metrics():
    """Fixture that returns regression metrics."""
    return RegressionMetrics(
        rmse=2.0, mae=1.5, r2=0.5, mape=0.1, n_train=6, n_val=2, n_test=2
    )


################################################ Config echo


def test_echo_config(tiny_config, tmp_path):
    """Test the resolved config is written next to the run outputs."""
    path = echo_config(tmp_path, tiny_config)
    assert path.name == "config.json"
    assert json.loads(path.read_text())["seed"] == tiny_config.seed


################################################ Synth


def test_generate(tiny_config, tmp_path):
    """Test the city, its labels and the config are written."""
    city = SynthUseCase(tmp_path).generate(tiny_config)
    loaded = DatasetRepository(tmp_path / "dataset.jsonl").load()
    assert len(loaded) == len(city.dataset)
    assert len(LabelsRepository(tmp_path / "labels.jsonl").speeds()) == 24
    assert (tmp_path / "config.json").is_file()


@patch("app.use_cases.synth.DatasetRepository", spec=True)
def test_generate_exception(m_repo_dataset, tiny_config, tmp_path):
    """Test generate re-raises repository failures."""
    m_repo_dataset_instance = m_repo_dataset.return_value
    m_repo_dataset_instance.save.side_effect = DataException("disk full")

    with pytest.raises(DataException) as exc_info:
        SynthUseCase(tmp_path).generate(tiny_config)

    assert exc_info.value.detail == "disk full"
    assert not (tmp_path / "labels.jsonl").exists()


################################################ Pretrain


@patch("app.use_cases.pretrain.Trainer", spec=True)
def test_pretrain(m_trainer, one_epoch_config, dataset_path, tmp_path):
    """Test pretraining wires the run repositories into the trainer."""
    history = TrainingHistory()
    m_trainer.return_value.fit.return_value = history
    out_dir = tmp_path / "run"

    response = PretrainUseCase(dataset_path, out_dir).pretrain(one_epoch_config)

    assert response is history
    _, kwargs = m_trainer.call_args
    assert kwargs["checkpoint_repository"].path == out_dir / "checkpoint.json"
    assert kwargs["log_repository"].path == out_dir / "train_log.jsonl"
    assert (out_dir / "train_log.jsonl").read_text() == ""
    assert (out_dir / "config.json").is_file()


@patch("app.use_cases.pretrain.Trainer", spec=True)
def test_pretrain_reads_lonlat(m_trainer, one_epoch_config, tmp_path):
    """Test a configured lon/lat origin reaches the dataset repository."""
    m_trainer.return_value.fit.return_value = TrainingHistory()
    path = tmp_path / "degrees.jsonl"
    records = [
        {"id": 1, "kind": "point", "coords": [[13.4, 52.5]]},
        {"id": 2, "kind": "point", "coords": [[13.4003, 52.5002]]},
    ]
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    config = one_epoch_config.model_copy(
        update={"data": DataConfig(lonlat_origin=(13.4, 52.5))}
    )
    use_case = PretrainUseCase(path, tmp_path / "run")

    use_case.pretrain(config)

    assert use_case.dataset_repository.lonlat_origin == (13.4, 52.5)
    contexts = m_trainer.call_args.args[1]
    assert 20.0 < contexts[0].distances.max() < 50.0


def test_pretrain_missing_dataset(one_epoch_config, tmp_path):
    """Test a missing dataset aborts pretraining."""
    with pytest.raises(DataException) as exc_info:
        PretrainUseCase(tmp_path / "absent.jsonl", tmp_path).pretrain(
            one_epoch_config
        )
    assert "file not found" in exc_info.value.detail


def test_pretrain_then_embed(one_epoch_config, dataset_path, tmp_path):
    """Test a pretrained checkpoint embeds requested entities."""
    run_dir = tmp_path / "run"
    PretrainUseCase(dataset_path, run_dir).pretrain(one_epoch_config)
    assert len((run_dir / "train_log.jsonl").read_text().splitlines()) == 1

    export_dir = tmp_path / "export"
    embeddings = EmbedUseCase(
        dataset_path, run_dir / "checkpoint.json", export_dir
    ).embed(one_epoch_config, ids=[4, 3])

    assert [e.id for e in embeddings] == [4, 3]
    exported = EmbeddingRepository(export_dir / "embeddings.jsonl").as_arrays()
    assert sorted(exported) == [3, 4]
    assert exported[3].shape == (2 * one_epoch_config.model.d_model,)


def test_embed_unknown_id(one_epoch_config, dataset_path, tmp_path):
    """Test unknown ids are rejected before anything is exported."""
    run_dir = tmp_path / "run"
    PretrainUseCase(dataset_path, run_dir).pretrain(one_epoch_config)
    export_dir = tmp_path / "export"
    with pytest.raises(DataException):
        EmbedUseCase(dataset_path, run_dir / "checkpoint.json", export_dir).embed(
            one_epoch_config, ids=[99]
        )
    assert not (export_dir / "embeddings.jsonl").exists()


def test_frozen_config(tiny_config):
    """Test the checkpoint's model and seed win over the run config."""
    run = tiny_config.model_copy(
        update={"seed": 99, "probe": ProbeConfig(radius=10.0)}
    )
    merged = frozen_config(tiny_config, run)
    assert merged.seed == tiny_config.seed
    assert merged.model == tiny_config.model
    assert merged.probe.radius == 10.0


################################################ Probe


@patch("app.use_cases.probe.probe_classify", spec=True)
@patch("app.use_cases.probe.embed_entities", spec=True)
@patch("app.use_cases.probe.EmbedUseCase", spec=True)
@patch("app.use_cases.probe.CheckpointRepository", spec=True)
@patch("app.use_cases.probe.LabelsRepository", spec=True)
def test_classify(
    m_repo_labels,
    m_repo_checkpoint,
    m_embed_uc,
    m_embed_entities,
    m_probe_classify,
    small_dataset,
    tiny_config,
    classification_metrics,
    tmp_path,
):
    """Test zone probing on concatenated fused and semantic embeddings."""
    m_repo_labels.return_value.zones.return_value = {2: 0, 3: 1}
    m_repo_checkpoint.return_value.fingerprint.return_value = "abc"
    m_embed_uc.return_value.load.return_value = (small_dataset, None, tiny_config)
    m_embed_entities.return_value = [
        ContextualEmbedding(id=2, h_fused=[1.0], h_sem=[2.0]),
        ContextualEmbedding(id=3, h_fused=[3.0], h_sem=[4.0]),
    ]
    m_probe_classify.return_value = classification_metrics

    response = ProbeUseCase("d", "l", "c", tmp_path).classify(tiny_config)

    assert response == classification_metrics
    features, labels, _, _ = m_probe_classify.call_args.args
    np.testing.assert_allclose(features[3], [3.0, 4.0])
    assert labels == {2: 0, 3: 1}
    written = json.loads((tmp_path / "probe_classify.json").read_text())
    assert written["checkpoint_sha256"] == "abc"
    assert written["macro_f1"] == 80.0


@patch("app.use_cases.probe.probe_classify", spec=True)
@patch("app.use_cases.probe.embed_entities", spec=True)
@patch("app.use_cases.probe.EmbedUseCase", spec=True)
@patch("app.use_cases.probe.CheckpointRepository", spec=True)
@patch("app.use_cases.probe.LabelsRepository", spec=True)
def test_classify_checkpoint_changed(
    m_repo_labels,
    m_repo_checkpoint,
    m_embed_uc,
    m_embed_entities,
    m_probe_classify,
    small_dataset,
    tiny_config,
    classification_metrics,
    tmp_path,
):
    """Test probing fails if the checkpoint changes underneath it."""
    m_repo_labels.return_value.zones.return_value = {2: 0, 3: 1}
    m_repo_checkpoint.return_value.fingerprint.side_effect = ["abc", "def"]
    m_embed_uc.return_value.load.return_value = (small_dataset, None, tiny_config)
    m_embed_entities.return_value = []
    m_probe_classify.return_value = classification_metrics

    with pytest.raises(DataException) as exc_info:
        ProbeUseCase("d", "l", "c", tmp_path).classify(tiny_config)

    assert exc_info.value.detail == "checkpoint changed while probing"
    assert not (tmp_path / "probe_classify.json").exists()


@patch("app.use_cases.probe.CheckpointRepository", spec=True)
@patch("app.use_cases.probe.LabelsRepository", spec=True)
def test_classify_without_zones(
    m_repo_labels, m_repo_checkpoint, tiny_config, tmp_path
):
    """Test labels without zones cannot be probed."""
    m_repo_labels.return_value.zones.return_value = {}
    m_repo_checkpoint.return_value.fingerprint.return_value = "abc"

    with pytest.raises(DataException) as exc_info:
        ProbeUseCase("d", "l", "c", tmp_path).classify(tiny_config)

    assert exc_info.value.detail == "labels hold no zone labels"


@patch("app.use_cases.probe.probe_regress", spec=True)
@patch("app.use_cases.probe.EmbedUseCase", spec=True)
@patch("app.use_cases.probe.CheckpointRepository", spec=True)
@patch("app.use_cases.probe.LabelsRepository", spec=True)
def test_regress_semantic_baseline(
    m_repo_labels,
    m_repo_checkpoint,
    m_embed_uc,
    m_probe_regress,
    small_dataset,
    tiny_config,
    regression_metrics,
    tmp_path,
):
    """Test the token-only baseline pools raw semantic features per road."""
    config = tiny_config.model_copy(
        update={"probe": ProbeConfig(features="semantic")}
    )
    m_repo_labels.return_value.speeds.return_value = {1: 30.0}
    m_repo_checkpoint.return_value.fingerprint.return_value = "abc"
    m_embed_uc.return_value.load.return_value = (small_dataset, None, config)
    m_probe_regress.return_value = regression_metrics

    response = ProbeUseCase("d", "l", "c", tmp_path).regress(config)

    assert response == regression_metrics
    table = m_probe_regress.call_args.args[0]
    assert table.road_ids == [100]
    assert table.features.shape == (1, config.model.d_sem)
    assert (tmp_path / "probe_regress.json").is_file()


################################################ Verification


def test_gradcheck_defaults():
    """Test the gradient check covers 20 scenes and every coordinate by default."""
    defaults = inspect.signature(VerificationUseCase.gradcheck).parameters
    assert defaults["n_windows"].default == 20
    assert defaults["max_coords"].default is None


@patch("app.use_cases.verification.grad_check_outputs", spec=True)
def test_gradcheck_report(m_grad_check, tiny_config, tmp_path):
    """Test every loss is checked once per scene and the report is written."""
    m_grad_check.return_value = {
        name: 1e-7 for name in ("mgsm", "geo", "acc", "rsr", "joint")
    }

    report = VerificationUseCase(tmp_path).gradcheck(
        tiny_config, n_windows=2, max_coords=1
    )

    assert set(report.errors) == {"mgsm", "geo", "acc", "rsr", "joint"}
    assert report.passed
    assert m_grad_check.call_count == 2
    assert m_grad_check.call_args.kwargs["max_coords"] == 1
    assert json.loads((tmp_path / "gradcheck.json").read_text())["n_windows"] == 2


@patch("app.use_cases.verification.grad_check_outputs", spec=True)
def test_gradcheck_failure(m_grad_check, tiny_config):
    """Test one large error fails the check."""
    m_grad_check.return_value = {"mgsm": 1e-7, "geo": 1e-2, "joint": 1e-7}

    report = VerificationUseCase().gradcheck(tiny_config, n_windows=1, max_coords=1)

    assert report.errors["geo"] == 1e-2
    assert report.errors["acc"] == 0.0
    assert not report.passed


@patch("app.use_cases.verification.grad_check_outputs", spec=True)
def test_gradcheck_scenes_hold_six_to_twelve_entities(m_grad_check, tiny_config):
    """Test every default scene is drawn with 6 to 12 entities."""
    m_grad_check.return_value = {"joint": 0.0}

    with patch(
        "app.use_cases.verification.random_scene", wraps=random_scene
    ) as m_random_scene:
        VerificationUseCase().gradcheck(tiny_config)

    sizes = [call.args[1] for call in m_random_scene.call_args_list]
    assert len(sizes) == 20
    assert all(6 <= size <= 12 for size in sizes)
    assert m_grad_check.call_count == 20


@patch("app.use_cases.verification.grad_check_outputs", spec=True)
@patch("app.use_cases.verification.random_scene", spec=True)
def test_gradcheck_rejects_oversized_scene(m_random_scene, m_grad_check, tiny_config):
    """Test a scene outside 6 to 12 entities stops the check."""
    m_random_scene.return_value = random_scene(np.random.default_rng(0), 13)

    with pytest.raises(DataException) as exc_info:
        VerificationUseCase().gradcheck(tiny_config, n_windows=1)

    assert "13 entities" in exc_info.value.detail
    m_grad_check.assert_not_called()


def test_gradcheck_runs_every_loss(tiny_config):
    """Test a real sampled check reports bounded errors for every loss."""
    report = VerificationUseCase().gradcheck(tiny_config, n_windows=1, max_coords=2)
    assert set(report.errors) == {"mgsm", "geo", "acc", "rsr", "joint"}
    assert all(0.0 <= error <= 1.0 for error in report.errors.values())


def test_relcheck(tiny_config, tmp_path):
    """Test the relation classifier agrees with the lattice oracle."""
    report = VerificationUseCase(tmp_path).relcheck(tiny_config, n_pairs=100)
    assert report.passed
    assert report.mismatches == []
    assert (tmp_path / "relcheck.json").is_file()
