"""Prediction, model files, growth, and multi-class behavior."""

import numpy as np
import pytest

from sol import create_model, load_model, predict, save_model, train_online
from sol.errors import ConfigError, ModelFormatError
from sol.synth import make_random_stream
from sol.types import sparse_from_pairs

from helpers import run_impl, step


class TestPredict:
    def test_zero_model_ties_to_class_zero(self):
        m = create_model("ogd")
        p = predict(m, sparse_from_pairs([(1, 7.0)]))
        assert p.label == 0

    def test_binary_score(self):
        m = create_model("ogd")
        m.ensure_capacity(4)
        m.weights[0][1] = 0.5
        m.weights[0][3] = 0.25
        p = predict(m, sparse_from_pairs([(1, 1.0), (3, 2.0)]))
        assert p.label == 1
        assert p.scores[1] == 1.0

    def test_multiclass_zero_model_tie_break(self):
        m = create_model("ogd", class_count=3)
        p = predict(m, sparse_from_pairs([(2, 1.0)]))
        assert p.label == 0

    def test_argmax_invariant_under_positive_scaling(self):
        rng = np.random.default_rng(2)
        m = create_model("perceptron", class_count=4)
        m.ensure_capacity(10)
        for c in range(4):
            m.weights[c][1:10] = rng.normal(size=9)
        x = sparse_from_pairs([(i, v) for i, v in
                               enumerate(rng.uniform(-1, 1, 9), start=1)])
        base = predict(m, x).label
        for c in range(4):
            m.weights[c] *= 7.5
        assert predict(m, x).label == base

    def test_out_of_range_features_read_zero(self):
        m = create_model("ogd")
        m.ensure_capacity(4)
        m.weights[0][1] = 1.0
        p = predict(m, sparse_from_pairs([(1, 1.0), (500, 9.0)]))
        assert p.scores[1] == 1.0


class TestBias:
    def test_bias_contributes_to_score(self):
        m = create_model("ogd", bias=True, params={"eta": 1.0, "power_t": 0.0})
        step(m, {1: 1.0}, 1)
        # update touched both the bias (id 0) and feature 1
        assert m.weights[0][0] == 1.0
        assert m.weights[0][1] == 1.0

    def test_feature_zero_conflicts_with_bias(self):
        m = create_model("ogd", bias=True)
        with pytest.raises(ConfigError):
            step(m, {0: 1.0, 1: 1.0}, 1)

    def test_empty_example_with_bias_still_updates(self):
        m = create_model("ogd", bias=True, params={"eta": 1.0, "power_t": 0.0})
        step(m, {}, 1)
        assert m.weights[0][0] == 1.0


class TestGrowth:
    def test_weights_grow_with_observed_indices(self):
        m = create_model("arow")
        step(m, {5: 1.0}, 1)
        assert m.capacity >= 6
        step(m, {100: 1.0}, 1)
        assert m.capacity >= 101
        # confidence fill for fresh coordinates is the prior 1
        assert m.aux_vec["sigma"][0][99] == 1.0

    def test_dim_tracks_max_seen(self):
        m = create_model("ogd")
        step(m, {7: 1.0}, 1)
        assert m.dim == 8


class TestSaveLoad:
    @pytest.mark.parametrize("name", ["perceptron", "ogd", "pa1", "alma",
                                      "rda", "sop", "cw", "arow",
                                      "ada-fobos-l1", "ada-rda-l1", "stg",
                                      "fobos-l1", "rda-l1", "erda-l1"])
    def test_round_trip_predictions_bitwise(self, name, tmp_path):
        data = make_random_stream(150, d=20, seed=9)
        params = {"lambda": 0.05} if "l1" in name or name == "stg" else None
        model = run_impl(name, data, params)
        path = tmp_path / "m.model"
        save_model(model, path)
        loaded = load_model(path)
        probe = make_random_stream(40, d=24, seed=10)
        for chunk in probe.iter_chunks():
            for i in range(len(chunk)):
                idx, vals, _ = chunk.row(i)
                x = sparse_from_pairs(list(zip(idx.tolist(), vals.tolist())))
                a = predict(model, x)
                b = predict(loaded, x)
                assert a.label == b.label
                assert np.array_equal(a.scores, b.scores)

    def test_zero_model_sections_empty(self, tmp_path):
        m = create_model("ogd")
        path = tmp_path / "zero.model"
        save_model(m, path)
        text = path.read_text()
        assert "w 0:" in text
        # no index:value pairs after the weight tag
        w_line = [l for l in text.splitlines() if l.startswith("w 0:")][0]
        assert w_line.strip() == "w 0:"

    def test_tampered_header_rejected(self, tmp_path):
        m = create_model("ogd")
        path = tmp_path / "m.model"
        save_model(m, path)
        text = path.read_text().replace("classes: 2", "classes: x")
        path.write_text(text)
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_missing_header_key_rejected(self, tmp_path):
        m = create_model("ogd")
        path = tmp_path / "m.model"
        save_model(m, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[1:]) + "\n")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_unknown_algo_rejected(self, tmp_path):
        m = create_model("ogd")
        path = tmp_path / "m.model"
        save_model(m, path)
        path.write_text(path.read_text().replace("algo: ogd", "algo: sgd9000"))
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_save_load_save_byte_identical(self, tmp_path):
        data = make_random_stream(200, d=16, seed=11)
        model = run_impl("ada-rda-l1", data, {"lambda": 0.02})
        p1 = tmp_path / "a.model"
        p2 = tmp_path / "b.model"
        save_model(model, p1)
        save_model(load_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_multiclass_round_trip(self, tmp_path):
        data = make_random_stream(200, d=15, classes=4, seed=15)
        model = run_impl("arow", data, class_count=4)
        path = tmp_path / "mc.model"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.class_count == 4
        probe = make_random_stream(50, d=15, classes=4, seed=16)
        for chunk in probe.iter_chunks():
            for i in range(len(chunk)):
                idx, vals, _ = chunk.row(i)
                x = sparse_from_pairs(list(zip(idx.tolist(), vals.tolist())))
                a, b = predict(model, x), predict(loaded, x)
                assert a.label == b.label
                assert np.array_equal(a.scores, b.scores)

    def test_loader_never_crashes_on_mutated_files(self, tmp_path):
        # random single-line corruptions either load (benign, e.g. a
        # whitespace change) or raise ModelFormatError; never another
        # exception type
        data = make_random_stream(100, d=10, seed=18)
        model = run_impl("ada-rda-l1", data, {"lambda": 0.02})
        path = tmp_path / "m.model"
        save_model(model, path)
        lines = path.read_text().splitlines()
        rng = np.random.default_rng(0)
        mutations = ["", "garbage", "w x: 1:abc", "aux nope 0: 1:1.0",
                     "scalar n: zz", "classes: -3", "t: 1.5",
                     "params: eta=oops", "w 0: -1:2.0", "w 0: 1:1:1"]
        target = tmp_path / "mut.model"
        for trial in range(60):
            mutated = list(lines)
            i = int(rng.integers(0, len(lines)))
            mutated[i] = mutations[int(rng.integers(0, len(mutations)))]
            target.write_text("\n".join(mutated) + "\n")
            try:
                load_model(target)
            except ModelFormatError:
                pass
        # negative weight indices must be rejected, not wrap around
        target.write_text("\n".join(lines[:6] + ["w 0: -1:2.0"]) + "\n")
        with pytest.raises(ModelFormatError):
            load_model(target)

    def test_warm_restart_continues_training(self, tmp_path):
        data = make_random_stream(100, d=12, seed=13)
        more = make_random_stream(100, d=12, seed=14)
        # one continuous run vs save/load between the halves
        a = create_model("arow")
        train_online(a, data)
        train_online(a, more)
        b = create_model("arow")
        train_online(b, data)
        path = tmp_path / "warm.model"
        save_model(b, path)
        b = load_model(path)
        train_online(b, more)
        hi = min(a.capacity, b.capacity)
        np.testing.assert_allclose(a.weights[0][:hi], b.weights[0][:hi],
                                   atol=1e-12)


class TestMulticlass:
    def test_single_competitor_update(self):
        m = create_model("ogd", class_count=3,
                         params={"eta": 1.0, "power_t": 0.0})
        step(m, {1: 1.0}, 2)
        # true class 2 pushed up, top violator (class 0 by tie-break) down
        assert m.weights[2][1] == 1.0
        assert m.weights[0][1] == -1.0
        assert m.weights[1][1] == 0.0

    def test_multiclass_ogd_matches_pair_reduction_reference(self):
        from reference import dense_stream_multiclass, ref_ogd_multiclass

        data = make_random_stream(400, d=20, classes=3, seed=23)
        model = run_impl("ogd", data, {"eta": 0.7, "power_t": 0.5},
                         class_count=3)
        W = ref_ogd_multiclass(dense_stream_multiclass(data, 20), 20, 3,
                               eta=0.7)
        for c in range(3):
            got = np.zeros(21)
            got[: min(model.capacity, 21)] = model.weights[c][:21]
            np.testing.assert_allclose(got, W[c], atol=1e-10, rtol=0)

    def test_multiclass_arow_matches_pair_reduction_reference(self):
        from reference import dense_stream_multiclass, ref_arow_multiclass

        data = make_random_stream(400, d=20, classes=3, seed=24)
        model = run_impl("arow", data, {"r": 0.8}, class_count=3)
        M, S = ref_arow_multiclass(dense_stream_multiclass(data, 20), 20, 3,
                                   r_param=0.8)
        for c in range(3):
            got_w = np.zeros(21)
            got_w[: min(model.capacity, 21)] = model.weights[c][:21]
            np.testing.assert_allclose(got_w, M[c], atol=1e-10, rtol=0)
            got_s = np.ones(21)
            got_s[: min(model.capacity, 21)] = model.aux_vec["sigma"][c][:21]
            np.testing.assert_allclose(got_s, S[c], atol=1e-10, rtol=0)

    def test_multiclass_training_learns(self):
        rng = np.random.default_rng(3)
        rows = []
        labels = []
        for _ in range(600):
            c = int(rng.integers(3))
            # class c fires feature ids 10c+1..10c+5
            idx = np.arange(10 * c + 1, 10 * c + 6)
            rows.append((idx, rng.uniform(0.5, 1.0, size=5)))
            labels.append(c)
        from helpers import dataset_from_examples
        from sol.types import Example, SparseVector

        examples = [Example(SparseVector(i.astype(np.int64), v), l)
                    for (i, v), l in zip(rows, labels)]
        data = dataset_from_examples(examples)
        for name in ("perceptron", "ogd", "pa", "arow", "cw", "ada-rda"):
            model = run_impl(name, data, class_count=3)
            from sol.evaluation import evaluate

            acc, _ = evaluate(model, data)
            assert acc > 0.95, f"{name}: {acc}"
