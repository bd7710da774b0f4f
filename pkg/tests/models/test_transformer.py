"""Parameter store and dual-stream transformer unit tests."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.autodiff import ops
from app.context.builder import build_window_context
from app.context.windows import select_masks
from app.losses.mgsm import loss_mgsm, mgsm_contributors
from app.models.params import ParamStore, init_params, is_decayed, parameter_shapes
from app.models.transformer import DualStreamTransformer
from app.repositories.checkpoint import CheckpointRepository
from app.schemas.context import SpatialWindow
from app.synthcity.scene import random_scene
from exceptions.exceptions import DataException

################################################ Parameters


def test_parameter_shapes(tiny_model_config):
    """Test the shapes of the projection, gate and head parameters."""
    shapes = parameter_shapes(tiny_model_config)
    assert shapes["proj_sem.W"] == (16, 8)
    assert shapes["proj_geom.W"] == (21, 8)
    assert shapes["gate.W1"] == (16, 8)
    assert shapes["topo.W2"] == (8, 4)
    assert shapes["rec.W2"] == (8, 16)
    assert "layers.0.W_V_sem" in shapes
    assert "layers.1.W_Q" not in shapes


def test_init_params(tiny_params, tiny_model_config):
    """Test fixed initial values of the gate bias, mask token and norms."""
    assert_allclose(tiny_params["gate.b2"].data, [[tiny_model_config.gate_bias]])
    assert_allclose(tiny_params["mask_token"].data, 0.0)
    assert_allclose(tiny_params["layers.0.sem.ln1.gain"].data, 1.0)
    assert_allclose(tiny_params["layers.0.sem.ln1.bias"].data, 0.0)
    bound = 1.0 / np.sqrt(16)
    assert np.abs(tiny_params["proj_sem.W"].data).max() <= bound


def test_init_params_is_seeded(tiny_model_config):
    """Test the same seed gives the same parameters."""
    a = init_params(tiny_model_config, seed=3).snapshot()
    b = init_params(tiny_model_config, seed=3).snapshot()
    c = init_params(tiny_model_config, seed=4).snapshot()
    assert all(np.array_equal(a[k], b[k]) for k in a)
    assert not np.array_equal(a["proj_sem.W"], c["proj_sem.W"])


@pytest.mark.parametrize(
    "name, decayed",
    [
        ("proj_sem.W", True),
        ("layers.0.W_Q", True),
        ("proj_sem.b", False),
        ("layers.0.sem.b_O", False),
        ("layers.0.sem.ln1.gain", False),
        ("mask_token", False),
    ],
)
def test_is_decayed(name, decayed):
    """Test weight decay skips biases, norms and the mask token."""
    assert is_decayed(name) is decayed


def test_document_round_trip(tiny_params, tiny_model_config):
    """Test parameters survive the JSON document form."""
    restored = ParamStore.from_document(
        tiny_params.to_document(), parameter_shapes(tiny_model_config)
    )
    assert restored.names() == tiny_params.names()
    assert_allclose(restored["topo.W1"].data, tiny_params["topo.W1"].data)


def test_document_with_missing_parameter(tiny_params, tiny_model_config):
    """Test a document missing a parameter is rejected."""
    document = tiny_params.to_document()
    del document["mask_token"]
    with pytest.raises(DataException) as exc_info:
        ParamStore.from_document(document, parameter_shapes(tiny_model_config))
    assert "mask_token" in exc_info.value.detail


def test_document_with_wrong_shape(tiny_params, tiny_model_config):
    """Test a parameter of the wrong shape is rejected."""
    document = tiny_params.to_document()
    document["gate.b2"] = {"shape": [1, 2], "data": [0.0, 0.0]}
    with pytest.raises(DataException):
        ParamStore.from_document(document, parameter_shapes(tiny_model_config))


################################################ Forward pass


def test_forward_shapes(tiny_model, scene_context):
    """Test stream, attention and gate shapes."""
    out = tiny_model.forward_window(scene_context.semantic, scene_context.geometry)
    assert out.h_sem.shape == out.h_fused.shape == (10, 8)
    assert out.alpha.shape == (10, 1)
    assert np.all((out.alpha.data > 0) & (out.alpha.data < 1))
    assert len(out.attention) == 1 and len(out.attention[0]) == 2
    for attention in out.attention[0]:
        assert_allclose(attention.data.sum(axis=1), 1.0)


def test_masked_row_ignores_its_semantics(tiny_model, scene_context):
    """Test a masked entity's own tokens cannot influence any output."""
    semantic = scene_context.semantic.copy()
    base = tiny_model.forward_window(semantic, scene_context.geometry, (4,))
    semantic[4] = np.random.default_rng(0).normal(size=16)
    changed = tiny_model.forward_window(semantic, scene_context.geometry, (4,))
    assert_allclose(base.h_sem.data, changed.h_sem.data)
    assert_allclose(base.h_fused.data, changed.h_fused.data)


def test_pair_heads(tiny_model, scene_context):
    """Test pair head shapes and symmetric prediction."""
    out = tiny_model.forward_window(scene_context.semantic, scene_context.geometry)
    distance, logits = tiny_model.predict_pair(out.h_fused, [0, 2], [1, 4])
    assert distance.shape == (2, 1)
    assert logits.shape == (2, 4)
    d_ij, r_ij = tiny_model.predict_pair_symmetric(out.h_fused, [0, 2], [1, 4])
    d_ji, r_ji = tiny_model.predict_pair_symmetric(out.h_fused, [1, 4], [0, 2])
    assert_allclose(d_ij, d_ji)
    assert_allclose(r_ij, r_ji)


def test_reconstruct_shape(tiny_model, scene_context):
    """Test reconstructions live in the semantic space."""
    out = tiny_model.forward_window(scene_context.semantic, scene_context.geometry)
    assert tiny_model.reconstruct(out.h_sem).shape == (10, 16)


def test_training_needs_two_entities(tiny_model, scene_context):
    """Test a single-entity window is rejected during training."""
    with pytest.raises(DataException):
        tiny_model.forward_window(
            scene_context.semantic[:1], scene_context.geometry[:1], training=True
        )


def test_masked_semantics_never_leak(tiny_model, encoder, tiny_window_config):
    """Test masked tokens reach the targets but no output, over 100 windows."""
    changed_losses = 0
    for index in range(100):
        rng = np.random.default_rng(1000 + index)
        scene = random_scene(rng, int(rng.integers(6, 13)))
        window = SpatialWindow(
            index=index,
            bounds=scene.extent,
            members=tuple(e.id for e in scene.entities),
        )
        context = build_window_context(window, scene, encoder, tiny_window_config)
        masked = context.rows(select_masks(context.ids, 0.3, rng))
        replaced = context.semantic.copy()
        replaced[masked] = rng.normal(size=(len(masked), replaced.shape[1]))

        base = tiny_model.forward_window(context.semantic, context.geometry, masked)
        swapped = tiny_model.forward_window(replaced, context.geometry, masked)
        assert np.array_equal(base.h_sem.data, swapped.h_sem.data)
        assert np.array_equal(base.h_fused.data, swapped.h_fused.data)
        assert np.array_equal(base.alpha.data, swapped.alpha.data)

        contributors = mgsm_contributors(context.token_keys, masked)
        if not contributors:
            continue
        predicted = tiny_model.reconstruct(ops.gather_rows(base.h_sem, contributors))
        before = loss_mgsm(
            predicted, context.semantic, contributors, context.token_keys, 0.07
        )
        after = loss_mgsm(predicted, replaced, contributors, context.token_keys, 0.07)
        assert before.item() != after.item()
        changed_losses += 1
    assert changed_losses > 0


def test_semantic_values_only_move_the_semantic_stream(
    tiny_params, tiny_model_config, scene_context
):
    """Test perturbing the semantic value projection leaves the fused stream."""
    base = DualStreamTransformer(tiny_params, tiny_model_config).forward_window(
        scene_context.semantic, scene_context.geometry, (4,)
    )
    perturbed = ParamStore.from_document(tiny_params.to_document())
    perturbed["layers.0.W_V_sem"].data += 0.5
    moved = DualStreamTransformer(perturbed, tiny_model_config).forward_window(
        scene_context.semantic, scene_context.geometry, (4,)
    )
    assert not np.allclose(base.h_sem.data, moved.h_sem.data)
    assert np.array_equal(base.h_fused.data, moved.h_fused.data)
    for before, after in zip(base.attention[0], moved.attention[0]):
        assert np.array_equal(before.data, after.data)


def test_forward_is_permutation_equivariant(tiny_model, scene_context):
    """Test reordering the entities reorders the outputs the same way."""
    order = np.random.default_rng(5).permutation(scene_context.n)
    position = {int(row): k for k, row in enumerate(order)}
    masked = (2, 7)
    base = tiny_model.forward_window(
        scene_context.semantic, scene_context.geometry, masked
    )
    shuffled = tiny_model.forward_window(
        scene_context.semantic[order],
        scene_context.geometry[order],
        tuple(position[row] for row in masked),
    )
    assert_allclose(shuffled.h_sem.data, base.h_sem.data[order], atol=1e-10)
    assert_allclose(shuffled.h_fused.data, base.h_fused.data[order], atol=1e-10)
    assert_allclose(shuffled.alpha.data, base.alpha.data[order], atol=1e-12)


def test_checkpoint_reload_reproduces_forward(
    tiny_params, tiny_config, scene_context, tmp_path
):
    """Test a saved and reloaded model computes identical outputs."""
    repository = CheckpointRepository(tmp_path / "checkpoint.json")
    repository.save(tiny_params, tiny_config, epoch=0)
    loaded, config, _ = repository.load()

    base = DualStreamTransformer(tiny_params, tiny_config.model).forward_window(
        scene_context.semantic, scene_context.geometry
    )
    reloaded = DualStreamTransformer(loaded, config.model).forward_window(
        scene_context.semantic, scene_context.geometry
    )
    assert np.array_equal(base.h_sem.data, reloaded.h_sem.data)
    assert np.array_equal(base.h_fused.data, reloaded.h_fused.data)
