"""Self-contained synthetic benchmark writers (libsvm text).

The orchestrator ships its own generators rather than importing the
trainer's internals; the text format is the only shared contract.
"""

import numpy as np


def _write(path, labels, rows):
    with open(path, "w", encoding="ascii") as fh:
        for y, row in zip(labels, rows):
            pairs = " ".join(f"{i}:{v:.6g}" for i, v in row)
            fh.write(f"{'+1' if y > 0 else '-1'} {pairs}\n")


def write_separable(path, n, d=100, margin=0.1, density=0.3, seed=0,
                    concept_seed=None):
    """Linearly separable labeled stream with unit-norm examples."""
    rng = np.random.default_rng(seed)
    concept = np.random.default_rng(
        seed if concept_seed is None else concept_seed)
    w_star = concept.normal(size=d)
    w_star /= np.linalg.norm(w_star)
    labels = []
    rows = []
    while len(rows) < n:
        batch = min(max(4 * (n - len(rows)), 1024), 50_000)
        X = rng.uniform(-1.0, 1.0, size=(batch, d))
        X *= rng.random(size=(batch, d)) < density
        norms = np.linalg.norm(X, axis=1)
        ok = norms > 0
        X[ok] /= norms[ok, None]
        m = X @ w_star
        for row in np.nonzero(ok & (np.abs(m) >= margin))[0]:
            if len(rows) >= n:
                break
            nz = np.nonzero(X[row])[0]
            rows.append(list(zip((nz + 1).tolist(), X[row, nz].tolist())))
            labels.append(1 if m[row] > 0 else -1)
    _write(path, labels, rows)
    return path


def write_sparse_informative(path, n, d=1000, informative=50, seed=0,
                             informative_per_example=15,
                             noise_per_example=10, label_noise=0.1):
    """Stream where only the first `informative` ids carry label signal."""
    rng = np.random.default_rng(seed)
    info_pool = np.arange(1, informative + 1)
    noise_pool = np.arange(informative + 1, d + 1)
    labels = []
    rows = []
    for _ in range(n):
        y = 1 if rng.random() < 0.5 else -1
        ii = rng.choice(info_pool, size=informative_per_example, replace=False)
        iv = y * rng.uniform(0.5, 1.0, size=informative_per_example)
        ni = rng.choice(noise_pool, size=noise_per_example, replace=False)
        nv = rng.uniform(-1.0, 1.0, size=noise_per_example)
        idx = np.concatenate((ii, ni))
        val = np.concatenate((iv, nv))
        order = np.argsort(idx)
        rows.append(list(zip(idx[order].tolist(), val[order].tolist())))
        if label_noise and rng.random() < label_noise:
            y = -y
        labels.append(y)
    _write(path, labels, rows)
    return path


def shuffle_lines(src, dst, seed):
    """Deterministically permute a text dataset's example order."""
    with open(src, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    order = np.random.default_rng(seed).permutation(len(lines))
    with open(dst, "w", encoding="utf-8") as fh:
        fh.writelines(lines[i] for i in order)
    return dst
