"""JSON artifact repository unit tests."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.models.params import init_params
from app.repositories.checkpoint import CheckpointRepository
from app.repositories.dataset import (
    DatasetRepository,
    parse_geoentity_record,
    tokenize,
)
from app.repositories.embedding import EmbeddingRepository
from app.repositories.labels import LabelsRepository
from app.repositories.training_log import TrainingLogRepository
from app.schemas.geoentity import GeometryKind
from app.schemas.report import ContextualEmbedding, LabelRecord, TrainingLogRecord
from exceptions.exceptions import (
    DataException,
    GeometryValidationException,
    ParseException,
)

################################################ Dataset


def test_tokenize():
    """Test tags split on non-alphanumerics, lowercased, duplicates kept."""
    assert tokenize(["amenity=cafe"]) == ("amenity", "cafe")
    assert tokenize(["Shop=Bakery", "shop:bakery"]) == (
        "shop",
        "bakery",
        "shop",
        "bakery",
    )
    assert tokenize([]) == ()


def test_parse_geoentity_record():
    """Test a valid line becomes a tokenized geoentity."""
    line = json.dumps(
        {"id": 7, "kind": "point", "coords": [[1.0, 2.0]], "tags": ["amenity=cafe"]}
    )
    entity = parse_geoentity_record(line, 1)
    assert entity.id == 7
    assert entity.kind == GeometryKind.point
    assert entity.tokens == ("amenity", "cafe")
    assert entity.parent_id is None


def test_parse_invalid_json():
    """Test broken JSON names its line."""
    with pytest.raises(ParseException) as exc_info:
        parse_geoentity_record("{not json", 4)
    assert exc_info.value.detail.startswith("line 4:")
    assert exc_info.value.line_number == 4


def test_parse_unknown_kind():
    """Test an unknown geometry kind is a malformed record."""
    line = json.dumps({"id": 1, "kind": "circle", "coords": [[0, 0]]})
    with pytest.raises(ParseException) as exc_info:
        parse_geoentity_record(line, 2)
    assert "malformed record" in exc_info.value.detail


def test_parse_invalid_geometry():
    """Test an open polygon fails geometry validation."""
    line = json.dumps(
        {"id": 1, "kind": "polygon", "coords": [[0, 0], [1, 0], [1, 1], [0, 1]]}
    )
    with pytest.raises(GeometryValidationException) as exc_info:
        parse_geoentity_record(line, 3)
    assert "polygon not closed" in exc_info.value.detail
    assert exc_info.value.detail.startswith("line 3:")


def test_dataset_round_trip(small_dataset, tmp_path):
    """Test a saved dataset loads back with an inferred extent."""
    repository = DatasetRepository(tmp_path / "entities.jsonl")
    assert repository.save(small_dataset) == 4
    loaded = repository.load()
    assert loaded.entities == small_dataset.entities
    assert loaded.extent == (0.0, 0.0, 50.0, 30.0)


def test_dataset_load_missing_file(tmp_path):
    """Test a missing dataset file is reported."""
    with pytest.raises(DataException) as exc_info:
        DatasetRepository(tmp_path / "absent.jsonl").load()
    assert "file not found" in exc_info.value.detail


def test_dataset_load_empty_file(tmp_path):
    """Test a dataset needs at least one entity."""
    path = tmp_path / "entities.jsonl"
    path.write_text("\n\n", encoding="utf-8")
    with pytest.raises(DataException) as exc_info:
        DatasetRepository(path).load()
    assert "no entities" in exc_info.value.detail


def test_dataset_load_duplicate_ids(tmp_path):
    """Test duplicate ids make the dataset invalid."""
    path = tmp_path / "entities.jsonl"
    record = json.dumps({"id": 1, "kind": "point", "coords": [[0, 0]]})
    path.write_text(f"{record}\n{record}\n", encoding="utf-8")
    with pytest.raises(DataException) as exc_info:
        DatasetRepository(path).load()
    assert "duplicate entity id 1" in exc_info.value.detail


def test_dataset_load_lonlat(tmp_path):
    """Test lon/lat records are projected to meters around the origin."""
    path = tmp_path / "entities.jsonl"
    records = [
        {"id": 1, "kind": "point", "coords": [[13.4, 52.5]]},
        {"id": 2, "kind": "point", "coords": [[13.4, 52.501]]},
    ]
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")

    dataset = DatasetRepository(path, lonlat_origin=(13.4, 52.5)).load()

    origin, north = dataset.entities
    assert_allclose(origin.geometry.coords, [(0.0, 0.0)], atol=1e-9)
    assert_allclose(north.geometry.coords, [(0.0, 111.19)], atol=0.01)


def test_dataset_load_polar_lonlat(tmp_path):
    """Test a latitude outside the projection range names its line."""
    path = tmp_path / "entities.jsonl"
    record = json.dumps({"id": 1, "kind": "point", "coords": [[0.0, 89.0]]})
    path.write_text(f"{record}\n", encoding="utf-8")
    with pytest.raises(GeometryValidationException) as exc_info:
        DatasetRepository(path, lonlat_origin=(0.0, 0.0)).load()
    assert exc_info.value.detail.startswith("line 1:")
    assert "latitude 89.0" in exc_info.value.detail


################################################ Labels


def test_labels(tmp_path):
    """Test zone and speed maps read back from label records."""
    repository = LabelsRepository(tmp_path / "labels.jsonl")
    repository.save(
        [
            LabelRecord(id=0, speed=25.5),
            LabelRecord(id=1, zone=3),
            LabelRecord(id=2),
        ]
    )
    assert repository.speeds() == {0: 25.5}
    assert repository.zones() == {1: 3}


def test_malformed_label(tmp_path):
    """Test unexpected label fields are rejected with their line."""
    path = tmp_path / "labels.jsonl"
    path.write_text('{"id": 1, "zone": 2, "color": "red"}\n', encoding="utf-8")
    with pytest.raises(ParseException) as exc_info:
        LabelsRepository(path).zones()
    assert exc_info.value.line_number == 1


################################################ Checkpoint


def test_checkpoint_round_trip(tiny_config, tmp_path):
    """Test parameters, config and epoch survive a checkpoint."""
    params = init_params(tiny_config.model, seed=tiny_config.seed)
    repository = CheckpointRepository(tmp_path / "checkpoint.json")
    repository.save(params, tiny_config, epoch=5)
    loaded, config, epoch = repository.load()
    assert epoch == 5
    assert config == tiny_config
    for name in params.names():
        assert_allclose(loaded[name].data, params[name].data)


def test_checkpoint_fingerprint(tiny_config, tmp_path):
    """Test the fingerprint is stable for identical checkpoints."""
    params = init_params(tiny_config.model, seed=tiny_config.seed)
    repository = CheckpointRepository(tmp_path / "checkpoint.json")
    repository.save(params, tiny_config, epoch=1)
    first = repository.fingerprint()
    repository.save(params, tiny_config, epoch=1)
    assert repository.fingerprint() == first
    assert len(first) == 64


def test_checkpoint_shape_mismatch(tiny_config, tmp_path):
    """Test a checkpoint whose parameters do not match its config is rejected."""
    params = init_params(tiny_config.model, seed=tiny_config.seed)
    wider = tiny_config.model_copy(
        update={"model": tiny_config.model.model_copy(update={"d_model": 12})}
    )
    repository = CheckpointRepository(tmp_path / "checkpoint.json")
    repository.save(params, wider, epoch=0)
    with pytest.raises(DataException):
        repository.load()


def test_checkpoint_not_a_checkpoint(tmp_path):
    """Test arbitrary JSON is not a checkpoint."""
    path = tmp_path / "checkpoint.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(DataException):
        CheckpointRepository(path).load()


################################################ Logs and embeddings


def test_training_log_append_and_reset(tmp_path):
    """Test records append in order and a reset truncates the log."""
    repository = TrainingLogRepository(tmp_path / "logs" / "train_log.jsonl")
    for batch in range(3):
        repository.append(
            TrainingLogRecord(
                epoch=0,
                batch=batch,
                l_mgsm=1.0,
                l_geo=2.0,
                l_acc=3.0,
                l_rsr=0.0,
                l_total=6.0,
                lr=1e-3,
                grad_norm=0.5,
            )
        )
    assert [r.batch for r in repository.get_all()] == [0, 1, 2]
    repository.reset()
    assert repository.get_all() == []


def test_embedding_export(tmp_path):
    """Test exported embeddings concatenate the fused and semantic rows."""
    repository = EmbeddingRepository(tmp_path / "embeddings.jsonl")
    repository.write_all(
        [ContextualEmbedding(id=3, h_fused=[1.0, 2.0], h_sem=[3.0], radius=50.0)]
    )
    line = json.loads((tmp_path / "embeddings.jsonl").read_text().strip())
    assert set(line) == {"id", "h_fused", "h_sem"}
    arrays = repository.as_arrays()
    assert_allclose(arrays[3], np.array([1.0, 2.0, 3.0]))
