"""STG, FOBOS-L1, RDA-L1, ERDA-L1: exact zeros, monotone sparsity, lazy math."""

import numpy as np
import pytest

from sol import create_model
from sol.errors import ConfigError
from sol.synth import make_random_stream, make_sparse_informative

from helpers import check_oracle_equivalence, impl_weights, run_impl, step

SPARSE_ALGOS = {
    "fobos-l1": {"eta": 0.5},
    "rda-l1": {"gamma": 1.0},
    "erda-l1": {"gamma": 1.0},
    "stg": {"eta": 0.5, "K": 5.0},
    "ada-fobos-l1": {"eta": 0.5, "delta": 1.0},
    "ada-rda-l1": {"eta": 0.5, "delta": 1.0},
}


class TestSTG:
    def test_truncation_zeroes_small_weight(self):
        # eta*K*lambda = 1*5*0.02 = 0.1 swallows the 0.05-size weight at
        # the 5th active step; margins stay below 1 so every step is active
        m = create_model("stg", params={"eta": 1.0, "power_t": 0.0,
                                        "lambda": 0.02, "K": 5.0})
        for _ in range(5):
            step(m, {1: 0.01, 2: 0.1}, 1)
        m.algorithm.flush(m)
        assert m.weights[0][1] == 0.0
        assert m.weights[0][2] == pytest.approx(0.4, abs=1e-12)

    def test_theta_guard_skips_large_weights(self):
        m = create_model("stg", params={"eta": 1.0, "power_t": 0.0,
                                        "lambda": 0.1, "K": 1.0, "theta": 0.3})
        step(m, {1: 1.0, 2: 0.2}, 1)
        m.algorithm.flush(m)
        # coordinate 1 ended above theta: untouched by truncation
        assert m.weights[0][1] == 1.0
        # coordinate 2 (0.2 <= theta) shrank by eta*lambda*K = 0.1
        assert m.weights[0][2] == pytest.approx(0.1, abs=1e-15)

    def test_zero_gravity_reduces_to_ogd(self):
        data = make_random_stream(300, d=16, seed=33)
        stg = run_impl("stg", data, {"eta": 0.7, "lambda": 0.0})
        ogd = run_impl("ogd", data, {"eta": 0.7})
        np.testing.assert_array_equal(impl_weights(stg, 16),
                                      impl_weights(ogd, 16))

    def test_K_validated(self):
        with pytest.raises(ConfigError):
            create_model("stg", params={"K": 0.0})
        with pytest.raises(ConfigError):
            create_model("stg", params={"K": 2.5})

    def test_oracle_equivalence(self):
        check_oracle_equivalence("stg", seed=131)

    def test_oracle_equivalence_finite_theta(self):
        check_oracle_equivalence("stg", seed=137,
                                 overrides={"theta": 0.2, "lambda": 0.08})


class TestFobosL1:
    def test_soft_threshold_zero_region(self):
        m = create_model("fobos-l1", params={"eta": 1.0, "power_t": 0.0,
                                             "lambda": 0.5})
        # one step: w~ = 0.3, eta*lambda = 0.5 -> exactly 0
        step(m, {1: 0.3}, 1)
        m.algorithm.flush(m)
        assert m.weights[0][1] == 0.0

    def test_sign_preserved_outside_zero_region(self):
        m = create_model("fobos-l1", params={"eta": 1.0, "power_t": 0.0,
                                             "lambda": 0.25})
        step(m, {1: 1.0}, 0)  # y=-1 -> w~ = -1.0 -> soft -> -0.75
        m.algorithm.flush(m)
        assert m.weights[0][1] == pytest.approx(-0.75, abs=1e-15)

    def test_lambda_zero_reduces_to_ogd(self):
        data = make_random_stream(300, d=16, seed=35)
        fobos = run_impl("fobos-l1", data, {"eta": 0.7, "lambda": 0.0})
        ogd = run_impl("ogd", data, {"eta": 0.7})
        np.testing.assert_array_equal(impl_weights(fobos, 16),
                                      impl_weights(ogd, 16))

    def test_oracle_equivalence(self):
        check_oracle_equivalence("fobos-l1", seed=141)


class TestRdaL1:
    def test_first_step_closed_form(self):
        m = create_model("rda-l1", params={"gamma": 1.0, "lambda": 0.5})
        step(m, {1: 1.0}, 1)  # gbar = -1
        m.algorithm.flush(m)
        assert m.weights[0][1] == 0.5

    def test_threshold_region_exact_zero(self):
        m = create_model("rda-l1", params={"gamma": 1.0, "lambda": 1.5})
        step(m, {1: 1.0}, 1)  # |gbar| = 1 <= 1.5
        m.algorithm.flush(m)
        assert m.weights[0][1] == 0.0

    def test_enhanced_never_denser_than_plain(self):
        for seed in (1, 2, 3):
            data = make_random_stream(400, d=64, density=0.2, seed=seed)
            plain = run_impl("rda-l1", data, {"gamma": 1.0, "lambda": 0.05})
            enh = run_impl("erda-l1", data, {"gamma": 1.0, "lambda": 0.05,
                                             "rho": 0.05})
            assert enh.nnz() <= plain.nnz()

    @pytest.mark.parametrize("name", ["rda-l1", "erda-l1"])
    def test_oracle_equivalence(self, name):
        check_oracle_equivalence(name, seed=151)


class TestSparsityProperties:
    @pytest.mark.parametrize("name", sorted(SPARSE_ALGOS))
    def test_exact_zeros_not_epsilon(self, name):
        data = make_random_stream(400, d=64, density=0.2, seed=7)
        params = dict(SPARSE_ALGOS[name], **{"lambda": 0.1})
        model = run_impl(name, data, params)
        w = impl_weights(model, 64)
        small = np.abs(w[w != 0.0])
        # no lingering epsilon-size weights below the exact-zero region
        if small.size:
            assert small.min() > 1e-12
        assert np.count_nonzero(w) < w.size - 1

    @pytest.mark.parametrize("name", sorted(SPARSE_ALGOS))
    def test_nnz_non_increasing_in_lambda(self, name):
        data = make_sparse_informative(n=1500, d=200, informative=20, seed=5)
        last = None
        for lam in (0.001, 0.01, 0.1, 1.0):
            params = dict(SPARSE_ALGOS[name], **{"lambda": lam})
            model = run_impl(name, data, params)
            nnz = model.nnz()
            if last is not None:
                assert nnz <= last, f"{name}: nnz grew at lambda={lam}"
            last = nnz


class TestLazyEagerEquivalence:
    """Lazy per-coordinate regularization must equal the dense eager path."""

    @pytest.mark.parametrize("name", sorted(SPARSE_ALGOS))
    def test_sparse_stream_matches_dense_reference(self, name):
        check_oracle_equivalence(name, seed=161, d=32, n=500)

    def test_untouched_coordinate_accumulates_shrinkage(self):
        # fobos-l1: a coordinate missing from k active steps owes exactly k
        # soft-thresholds; with a constant schedule those collapse to one
        lam, eta, k = 0.01, 1.0, 7
        m = create_model("fobos-l1", params={"eta": eta, "power_t": 0.0,
                                             "lambda": lam})
        step(m, {1: 1.0, 2: 1.0}, 1)
        w1_after_first = 1.0 - eta * lam  # forward 1.0, then one shrink
        for _ in range(k):
            # tiny feature keeps the margin below 1 (all steps active)
            # while never touching coordinate 1
            step(m, {2: 0.05}, 1)
        m.algorithm.flush(m)
        expected = w1_after_first - k * eta * lam
        assert m.weights[0][1] == pytest.approx(expected, abs=1e-12)

    def test_lambda_zero_lazy_is_identity(self):
        data = make_random_stream(200, d=16, seed=19)
        a = run_impl("fobos-l1", data, {"eta": 0.5, "lambda": 0.0})
        b = run_impl("fobos-l1", data, {"eta": 0.5, "lambda": 0.0})
        np.testing.assert_array_equal(impl_weights(a, 16), impl_weights(b, 16))

    def test_fresh_coordinate_no_op(self):
        from sol.model import effective_weights
        from sol.types import sparse_from_pairs

        m = create_model("fobos-l1", params={"eta": 1.0, "power_t": 0.0,
                                             "lambda": 0.1})
        step(m, {1: 1.0}, 1)
        # coordinate 1 was just touched: effective == stored
        x = sparse_from_pairs([(1, 1.0)])
        eff = effective_weights(m, x)[0]
        assert eff[0] == m.weights[0][1]

    @pytest.mark.parametrize("name", sorted(SPARSE_ALGOS))
    def test_two_passes_match_doubled_reference_stream(self, name):
        # lazy ledgers survive the pass boundary: training twice over the
        # data equals the dense eager reference on the concatenated stream
        import numpy as np
        from sol import train_online
        from sol.synth import make_random_stream
        from helpers import ORACLE_CASES, impl_weights, run_impl
        from reference import REFERENCES, dense_stream

        params, loss = ORACLE_CASES[name]
        data = make_random_stream(150, d=16, seed=171)
        model = run_impl(name, data, dict(params), loss, passes=2)
        stream = dense_stream(data, 16)
        full = dict(params)
        full.setdefault("power_t", 0.5)
        ref = REFERENCES[name](stream + stream, 16, full, loss)
        np.testing.assert_allclose(impl_weights(model, 16), ref["w"],
                                   atol=1e-10, rtol=0)

    def test_rda_warm_restart_after_save(self, tmp_path):
        import numpy as np
        from sol import load_model, save_model, train_online
        from sol.synth import make_random_stream
        from helpers import run_impl

        first = make_random_stream(120, d=12, seed=181)
        second = make_random_stream(120, d=12, seed=182)
        a = run_impl("rda-l1", first, {"lambda": 0.05})
        train_online(a, second)
        b = run_impl("rda-l1", first, {"lambda": 0.05})
        path = tmp_path / "warm.model"
        save_model(b, path)
        b = load_model(path)
        train_online(b, second)
        hi = min(a.capacity, b.capacity)
        np.testing.assert_allclose(a.weights[0][:hi], b.weights[0][:hi],
                                   atol=1e-12)
