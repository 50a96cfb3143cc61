"""Architecture fidelity, inference determinism, activation dumps, checkpoints."""
import numpy as np
import pytest

from oilspot.nn import batchnorm_forward
from oilspot.oilnet import (
    Checkpoint, CheckpointError, OilNet40, OilNet40Spec,
    dump_activations, load_checkpoint, predict, save_checkpoint,
)
from oilspot import rng as rngmod

from oracles import count_network_params, naive_conv2d


class TestSpecAndCounts:
    def test_default_spec_parameter_counts(self):
        model = OilNet40(OilNet40Spec(input_size=240, input_channels=3), seed=0)
        assert model.n_trainable() == 11_553_201
        assert model.n_non_trainable() == 1_040
        assert (model.n_trainable(), model.n_non_trainable()) == count_network_params(240, 3)

    def test_flatten_width_120(self):
        spec = OilNet40Spec(input_size=120, input_channels=3)
        assert spec.flatten_width == 15 * 15 * 32 == 7200

    @pytest.mark.parametrize("size,ch,d1,d2", [
        (120, 3, 400, 64), (48, 1, 100, 16), (240, 1, 400, 64), (96, 3, 32, 8),
    ])
    def test_counts_match_shape_oracle_across_specs(self, size, ch, d1, d2):
        spec = OilNet40Spec(input_size=size, input_channels=ch, dense_widths=(d1, d2))
        model = OilNet40(spec, seed=1)
        expect = count_network_params(size, ch, dense_widths=(d1, d2))
        assert (model.n_trainable(), model.n_non_trainable()) == expect

    def test_input_size_must_be_multiple_of_8(self):
        with pytest.raises(ValueError, match="multiple of 8"):
            OilNet40Spec(input_size=100)

    def test_same_seed_identical_parameters(self):
        a = OilNet40(OilNet40Spec(input_size=24), seed=5)
        b = OilNet40(OilNet40Spec(input_size=24), seed=5)
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert np.array_equal(pa.value, pb.value)
        c = OilNet40(OilNet40Spec(input_size=24), seed=6)
        assert not np.array_equal(a.conv_w[0].value, c.conv_w[0].value)


class TestInference:
    def make(self, seed=3):
        return OilNet40(OilNet40Spec(input_size=24, input_channels=3), seed=seed)

    def test_repeated_predict_bit_identical(self):
        model = self.make()
        g = rngmod.stream(1, 70)
        x = np.asarray(g.random((3, 24, 24)), dtype=np.float32)
        p1, l1 = predict(model, x)
        p2, l2 = predict(model, x)
        assert p1 == p2 and l1 == l2

    def test_batch_equals_per_sample(self):
        model = self.make()
        g = rngmod.stream(2, 70)
        xs = np.asarray(g.random((5, 3, 24, 24)), dtype=np.float32)
        probs, labels = predict(model, xs)
        for i in range(5):
            p, l = predict(model, xs[i])
            assert p == probs[i] and l == labels[i]

    def test_tie_at_threshold_is_normal(self):
        # probability exactly 0.5 must classify as normal (label 0)
        model = self.make()
        probs = np.asarray([0.5], dtype=np.float32)
        labels = (probs > np.float32(model.spec.threshold)).astype(int)
        assert labels[0] == 0

    def test_batchnorm_infer_copies_property(self):
        g = rngmod.stream(3, 70)
        x = np.asarray(g.normal(size=(1, 4, 6, 6)), dtype=np.float32)
        gamma = np.asarray(g.uniform(0.5, 2, 4), dtype=np.float32)
        beta = np.asarray(g.normal(size=4), dtype=np.float32)
        rm = np.asarray(g.normal(size=4), dtype=np.float32)
        rv = np.asarray(g.uniform(0.5, 2, 4), dtype=np.float32)
        single, _ = batchnorm_forward(x, gamma, beta, rm, rv, train=False)
        stacked, _ = batchnorm_forward(np.repeat(x, 7, axis=0), gamma, beta, rm, rv, train=False)
        for i in range(7):
            assert np.array_equal(stacked[i], single[0])


class TestActivationDump:
    def test_conv3_yields_32_maps_at_one_eighth_resolution(self):
        model = OilNet40(OilNet40Spec(input_size=240, input_channels=3), seed=0)
        x = np.asarray(rngmod.stream(4, 70).random((3, 240, 240)), dtype=np.float32)
        maps = dump_activations(model, x, conv_index=3)
        assert len(maps) == 32
        assert all(m.shape == (30, 30, 1) for m in maps)
        assert all(m.dtype == np.uint8 for m in maps)

    def test_zero_input_zero_bias_all_zero_maps(self):
        model = OilNet40(OilNet40Spec(input_size=24, input_channels=1), seed=0)
        for bn in model.conv_bn:  # identity normalization
            bn.beta.value[...] = 0
            bn.gamma.value[...] = 1
        x = np.zeros((1, 24, 24), dtype=np.float32)
        maps = dump_activations(model, x, conv_index=2)
        assert all(not m.any() for m in maps)

    def test_maps_match_naive_forward_slice(self):
        model = OilNet40(OilNet40Spec(input_size=16, input_channels=1,
                                      conv_filters=(2, 3, 4)), seed=9)
        g = rngmod.stream(5, 70)
        x = np.asarray(g.random((1, 16, 16)), dtype=np.float32)
        # independent forward: naive conv + scalar BN (running stats) + relu + 2x2 max
        h = x[None].astype(np.float64)
        bn = model.conv_bn[0]
        y = naive_conv2d(h, model.conv_w[0].value, model.conv_b[0].value, "same")
        y = (y - bn.running_mean.reshape(1, -1, 1, 1)) / np.sqrt(
            bn.running_var.reshape(1, -1, 1, 1) + np.float32(1e-5))
        y = y * bn.gamma.value.reshape(1, -1, 1, 1) + bn.beta.value.reshape(1, -1, 1, 1)
        y = np.maximum(y, 0)
        n, c, hh, ww = y.shape
        pooled = y.reshape(n, c, hh // 2, 2, ww // 2, 2).max(axis=(3, 5))
        got = model.feature_maps(x, conv_index=1)
        np.testing.assert_allclose(got, pooled[0], rtol=1e-4, atol=1e-5)

    def test_invalid_index_rejected(self):
        model = OilNet40(OilNet40Spec(input_size=24), seed=0)
        with pytest.raises(ValueError, match="conv_index"):
            model.feature_maps(np.zeros((3, 24, 24), dtype=np.float32), 4)


class TestCheckpoint:
    def make(self, tmp_path, seed=11):
        model = OilNet40(OilNet40Spec(input_size=24, input_channels=3), seed=seed)
        path = tmp_path / "m.onet40"
        save_checkpoint(Checkpoint.from_model(model, meta={"epochs_run": 3}), path)
        return model, path

    def test_round_trip_bit_exact(self, tmp_path):
        model, path = self.make(tmp_path)
        loaded = load_checkpoint(path)
        assert loaded.spec == model.spec
        assert loaded.meta["epochs_run"] == "3"
        for name, arr in model.named_tensors().items():
            assert np.array_equal(loaded.tensors[name], arr), name

    def test_predictions_survive_round_trip(self, tmp_path):
        model, path = self.make(tmp_path)
        restored = load_checkpoint(path).build_model()
        x = np.asarray(rngmod.stream(6, 70).random((3, 24, 24)), dtype=np.float32)
        assert predict(model, x) == predict(restored, x)

    def test_corrupted_magic_rejected(self, tmp_path):
        _, path = self.make(tmp_path)
        data = bytearray(path.read_bytes())
        data[0] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(path)

    def test_bad_version_rejected(self, tmp_path):
        _, path = self.make(tmp_path)
        data = bytearray(path.read_bytes())
        data[7] = 99
        path.write_bytes(bytes(data))
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(path)

    def test_truncated_blob_rejected(self, tmp_path):
        _, path = self.make(tmp_path)
        data = path.read_bytes()
        path.write_bytes(data[:len(data) - 100])
        with pytest.raises(CheckpointError, match="truncated"):
            load_checkpoint(path)
