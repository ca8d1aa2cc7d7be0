"""Shared test utilities."""

import numpy as np

from sol import create_model, train_online
from sol.evaluation import MemoryDataset
from sol.types import Example, SparseVector


def run_impl(algo, data, params=None, loss=None, class_count=2, bias=False,
             **train_kw):
    """Train a fresh model over a MemoryDataset and return it (flushed)."""
    model = create_model(algo, class_count, params, loss, bias)
    train_online(model, data, **train_kw)
    return model


def impl_weights(model, d):
    """Binary weight vector over feature ids 0..d as a dense array."""
    w = np.zeros(d + 1)
    n = min(model.capacity, d + 1)
    w[:n] = model.weights[0][:n]
    return w


def impl_aux(model, name, d):
    fill = model.algorithm.aux_vectors[name]
    a = np.full(d + 1, fill)
    arr = model.aux_vec[name][0]
    n = min(arr.size, d + 1)
    a[:n] = arr[:n]
    return a


def dataset_from_examples(examples):
    labels = np.asarray([e.label for e in examples], dtype=np.int64)
    indptr = np.zeros(len(examples) + 1, dtype=np.int64)
    for i, e in enumerate(examples):
        indptr[i + 1] = indptr[i] + len(e.features)
    if examples:
        indices = np.concatenate([e.features.indices for e in examples])
        values = np.concatenate([e.features.values for e in examples])
    else:
        indices = np.empty(0, np.int64)
        values = np.empty(0, np.float64)
    return MemoryDataset(labels, indptr, indices, values)


def single(idx_vals, label):
    """One-example dataset from a {index: value} dict."""
    pairs = sorted(idx_vals.items())
    vec = SparseVector(
        np.asarray([p[0] for p in pairs], dtype=np.int64),
        np.asarray([p[1] for p in pairs], dtype=np.float64),
    )
    return dataset_from_examples([Example(vec, label)])


def step(model, mapping, label):
    """Feed one {index: value} example straight to the model's algorithm."""
    pairs = sorted(mapping.items())
    idx = np.asarray([p[0] for p in pairs], dtype=np.int64)
    vals = np.asarray([p[1] for p in pairs], dtype=np.float64)
    if idx.size:
        model.ensure_capacity(int(idx[-1]) + 1)
    aidx, avals = model.augment(idx, vals)
    return model.algorithm.update(model, aidx, avals, label)


# Hyperparameters pinned for the oracle-equivalence runs: values chosen so
# every branch (clamps, thresholds, truncation periods) actually fires on
# random +/-1 streams.
ORACLE_CASES = {
    "perceptron": ({}, "bool"),
    "ogd": ({"eta": 0.7, "power_t": 0.5}, "hinge"),
    "pa": ({}, "hinge"),
    "pa1": ({"C": 0.3}, "hinge"),
    "pa2": ({"C": 0.3}, "hinge"),
    "alma": ({"alpha": 0.9, "eta": 1.2}, "hinge"),
    "rda": ({"gamma": 2.0}, "hinge"),
    "sop": ({"a": 1.5}, "bool"),
    "cw": ({"phi": 0.5244005127080407}, "hinge"),
    "eccw": ({"phi": 0.5244005127080407}, "hinge"),
    "arow": ({"r": 0.7}, "hinge"),
    "ada-fobos": ({"eta": 0.8, "delta": 0.5}, "hinge"),
    "ada-rda": ({"eta": 0.8, "delta": 0.5}, "hinge"),
    "stg": ({"eta": 0.5, "power_t": 0.5, "lambda": 0.05, "K": 5.0,
             "theta": float("inf")}, "hinge"),
    "fobos-l1": ({"eta": 0.5, "power_t": 0.5, "lambda": 0.02}, "hinge"),
    "rda-l1": ({"gamma": 1.5, "lambda": 0.05}, "hinge"),
    "erda-l1": ({"gamma": 1.5, "lambda": 0.05, "rho": 0.01}, "hinge"),
    "ada-fobos-l1": ({"eta": 0.8, "delta": 0.5, "lambda": 0.03}, "hinge"),
    "ada-rda-l1": ({"eta": 0.8, "delta": 0.5, "lambda": 0.03}, "hinge"),
}

ORACLE_AUX = {
    "sop": ("S",),
    "cw": ("sigma",),
    "eccw": ("sigma",),
    "arow": ("sigma",),
    "rda": ("gsum",),
    "ada-fobos": ("G",),
    "ada-fobos-l1": ("G",),
    "ada-rda": ("G", "gsum"),
    "ada-rda-l1": ("G", "gsum"),
    "rda-l1": ("gsum",),
    "erda-l1": ("gsum",),
}


def check_oracle_equivalence(name, seed=0, n=500, d=24, tol=1e-10,
                             overrides=None):
    """Train the library path and the dense eager reference on the same
    random stream; weights (and saved accumulators) must agree to tol."""
    from sol.synth import make_random_stream
    from reference import REFERENCES, dense_stream

    params, loss = ORACLE_CASES[name]
    params = dict(params)
    if overrides:
        params.update(overrides)
    data = make_random_stream(n, d=d, density=0.4, classes=2, seed=seed)
    model = run_impl(name, data, params, loss)
    full = dict(params)
    full.setdefault("power_t", 0.5)
    ref = REFERENCES[name](dense_stream(data, d), d, full, loss)
    np.testing.assert_allclose(
        impl_weights(model, d), ref["w"], atol=tol, rtol=0,
        err_msg=f"{name}: weights diverge from the dense reference",
    )
    for aux_name in ORACLE_AUX.get(name, ()):
        expected = np.asarray(ref[aux_name], dtype=np.float64)
        got = impl_aux(model, aux_name, d)
        np.testing.assert_allclose(got, expected, atol=tol, rtol=0,
                                   err_msg=f"{name}: aux {aux_name} diverges")
    return model, ref
