"""Sparse example containers shared by the parsers, pipeline, and learners.

Feature ids are 1-based (libsvm convention); id 0 is reserved for the
optional bias term. Feature values are quantized to float32 precision by
the parsers but held as float64 so that all model arithmetic runs in
double precision.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError

# Known hyperparameter names; per-algorithm acceptance is enforced by the
# algorithm registry at configuration time.
KNOWN_PARAMS = (
    "eta", "lambda", "C", "delta", "r", "phi", "alpha",
    "power_t", "K", "theta", "rho", "gamma", "a",
)


def quantize_f32(values):
    """Round float64 values through float32, returning float64.

    Applied by every parser so that text- and binary-sourced streams carry
    bitwise-identical feature values.
    """
    return np.asarray(values, dtype=np.float32).astype(np.float64)


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse vector: strictly increasing indices, no zero values."""

    indices: np.ndarray  # int64, strictly increasing, >= 0
    values: np.ndarray   # float64, no exact zeros, same length

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise FormatError("indices and values must be 1-d and equal length")
        if idx.size:
            if idx[0] < 0:
                raise FormatError(f"negative feature index {idx[0]}")
            if np.any(np.diff(idx) <= 0):
                raise FormatError("indices must be strictly increasing")
            if np.any(val == 0.0):
                raise FormatError("zero values are not stored")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    def __len__(self):
        return int(self.indices.size)

    @property
    def max_index(self):
        return int(self.indices[-1]) if self.indices.size else -1

    def to_pairs(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))


def sparse_from_pairs(pairs):
    """Build a canonical SparseVector from (index, value) pairs.

    Sorts by index, keeps the last value for duplicate indices, and drops
    exact zeros. Negative indices raise FormatError.
    """
    if not len(pairs):
        return SparseVector(np.empty(0, np.int64), np.empty(0, np.float64))
    idx = np.asarray([p[0] for p in pairs], dtype=np.int64)
    val = np.asarray([p[1] for p in pairs], dtype=np.float64)
    if np.any(idx < 0):
        raise FormatError(f"negative feature index {int(idx.min())}")
    # stable sort + keep the last occurrence per index
    order = np.argsort(idx, kind="stable")
    idx, val = idx[order], val[order]
    last = np.ones(idx.size, dtype=bool)
    last[:-1] = idx[1:] != idx[:-1]
    idx, val = idx[last], val[last]
    keep = val != 0.0
    return SparseVector(idx[keep], val[keep])


def dot(w, x):
    """Dense-sparse dot product; indices beyond len(w) read as zero."""
    w = np.asarray(w, dtype=np.float64)
    idx, val = x.indices, x.values
    if idx.size and idx[-1] >= w.size:
        keep = idx < w.size
        idx, val = idx[keep], val[keep]
    return float(w[idx] @ val) if idx.size else 0.0


@dataclass
class Example:
    """One labeled sparse example; label is a class id in {0..C-1}."""

    features: SparseVector
    label: int


@dataclass
class DataChunk:
    """An ordered batch of examples in CSR layout.

    Chunks flow through the load pipeline in file order with consecutive
    sequence ids starting at 0.
    """

    sequence_id: int
    labels: np.ndarray   # int64, shape (n,)
    indptr: np.ndarray   # int64, shape (n+1,)
    indices: np.ndarray  # int64, concatenated feature ids
    values: np.ndarray   # float64 (f32-quantized), concatenated
    max_index: int = field(default=-1)

    def __post_init__(self):
        if self.max_index < 0 and self.indices.size:
            self.max_index = int(self.indices.max())

    def __len__(self):
        return int(self.labels.size)

    def row(self, i):
        """(indices, values, label) views for example i."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.values[lo:hi], int(self.labels[i])

    @property
    def examples(self):
        return [
            Example(SparseVector(*self.row(i)[:2]), int(self.labels[i]))
            for i in range(len(self))
        ]

    def __iter__(self):
        return iter(self.examples)


def chunk_from_examples(sequence_id, examples):
    """Pack Example objects into CSR chunk form."""
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
    return DataChunk(sequence_id, labels, indptr, indices, values)
