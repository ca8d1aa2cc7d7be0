"""Synthetic sparse classification streams for benchmarks and tests."""

import numpy as np

from .evaluation import MemoryDataset
from .types import quantize_f32


def _to_csr(rows_idx, rows_val, labels):
    counts = np.asarray([len(r) for r in rows_idx], dtype=np.int64)
    indptr = np.zeros(counts.size + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(counts)
    indices = (np.concatenate(rows_idx) if rows_idx else np.empty(0, np.int64))
    values = (np.concatenate(rows_val) if rows_val else np.empty(0, np.float64))
    return MemoryDataset(
        np.asarray(labels, dtype=np.int64),
        indptr,
        indices.astype(np.int64),
        quantize_f32(values),
    )


def make_separable(n, d=100, margin=0.1, density=0.3, seed=0,
                   concept_seed=None):
    """Linearly separable stream with ||x|| = 1 and |<w*, x>| >= margin.

    Labels follow the sign of the planted unit-norm weight vector, so the
    classic perceptron mistake bound (R / margin)^2 applies with R = 1.
    Streams built with the same `concept_seed` share the separator, so a
    train/test pair uses one concept_seed and two sample seeds.
    """
    rng = np.random.default_rng(seed)
    concept = np.random.default_rng(
        seed if concept_seed is None else concept_seed)
    w_star = concept.normal(size=d)
    w_star /= np.linalg.norm(w_star)

    label_parts = []
    idx_parts = []
    val_parts = []
    count_parts = []
    got = 0
    while got < n:
        batch = min(max(4 * (n - got), 1024), 50_000)
        X = rng.uniform(-1.0, 1.0, size=(batch, d))
        X *= rng.random(size=(batch, d)) < density
        norms = np.linalg.norm(X, axis=1)
        ok = norms > 0
        X[ok] /= norms[ok, None]
        m = X @ w_star
        keep = np.nonzero(ok & (np.abs(m) >= margin))[0][: n - got]
        if keep.size == 0:
            continue
        kept = X[keep]
        mask = kept != 0.0
        rows, cols = np.nonzero(mask)
        count_parts.append(mask.sum(axis=1))
        idx_parts.append((cols + 1).astype(np.int64))  # ids are 1-based
        val_parts.append(kept[rows, cols])
        label_parts.append((m[keep] > 0).astype(np.int64))
        got += keep.size
    labels = np.concatenate(label_parts)
    counts = np.concatenate(count_parts)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(counts)
    return MemoryDataset(labels, indptr,
                         np.concatenate(idx_parts),
                         quantize_f32(np.concatenate(val_parts)))


def make_sparse_informative(n=10_000, d=1_000, informative=50, seed=0,
                            informative_per_example=10, noise_per_example=40,
                            informative_scale=(0.5, 1.0), noise_scale=1.0,
                            label_noise=0.0):
    """Stream where only the first `informative` feature ids carry label
    signal; the rest are symmetric noise. Built for L1 feature-recovery
    checks. label_noise flips that fraction of labels, which keeps
    margin-driven learners active for the whole stream.
    """
    rng = np.random.default_rng(seed)
    labels = []
    rows_idx = []
    rows_val = []
    noise_pool = np.arange(informative + 1, d + 1)
    info_pool = np.arange(1, informative + 1)
    lo, hi = informative_scale
    for _ in range(n):
        y = 1.0 if rng.random() < 0.5 else -1.0
        ii = rng.choice(info_pool, size=informative_per_example, replace=False)
        iv = y * rng.uniform(lo, hi, size=informative_per_example)
        ni = rng.choice(noise_pool, size=noise_per_example, replace=False)
        nv = rng.uniform(-noise_scale, noise_scale, size=noise_per_example)
        idx = np.concatenate((ii, ni))
        val = np.concatenate((iv, nv))
        order = np.argsort(idx)
        rows_idx.append(idx[order])
        rows_val.append(val[order])
        if label_noise and rng.random() < label_noise:
            y = -y
        labels.append(1 if y > 0 else 0)
    return _to_csr(rows_idx, rows_val, labels)


def make_fixed_nnz_stream(n, nnz=50, d=100_000, seed=0):
    """Large benchmark stream with exactly nnz features per example.

    Fully vectorized: feature ids are per-row cumulative sums of positive
    gaps, so they are strictly increasing by construction.
    """
    rng = np.random.default_rng(seed)
    max_gap = max(2, (2 * d) // nnz)
    gaps = rng.integers(1, max_gap, size=(n, nnz), dtype=np.int64)
    ids = np.cumsum(gaps, axis=1)
    vals = rng.uniform(-1.0, 1.0, size=(n, nnz))
    vals[vals == 0.0] = 0.5
    labels = rng.integers(0, 2, size=n, dtype=np.int64)
    indptr = np.arange(n + 1, dtype=np.int64) * nnz
    return MemoryDataset(labels, indptr, ids.reshape(-1),
                         quantize_f32(vals.reshape(-1)))


def make_random_stream(n, d=32, density=0.4, classes=2, seed=0):
    """Unstructured random stream used by the oracle-equivalence tests."""
    rng = np.random.default_rng(seed)
    labels = []
    rows_idx = []
    rows_val = []
    for _ in range(n):
        nnz = max(1, rng.binomial(d, density))
        idx = np.sort(rng.choice(np.arange(1, d + 1), size=nnz, replace=False))
        val = rng.uniform(-1.0, 1.0, size=nnz)
        val[val == 0.0] = 0.5
        rows_idx.append(idx)
        rows_val.append(val)
        labels.append(int(rng.integers(classes)))
    return _to_csr(rows_idx, rows_val, labels)
