"""Training driver, holdout evaluation, and grid cross-validation.

The driver follows the standard online protocol: predict, observe the
label, count the (pre-update) mistake, then hand the example to the
algorithm, which decides whether to act. Training is a deterministic
function of the input bytes, algorithm, parameters, and seed.
"""

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EvaluationError, SolError
from .pario import DataSource, LabelError, Pipeline, pipeline_load
from .pario.pipeline import DEFAULT_BUFFER_CHUNKS, DEFAULT_CHUNK_SIZE
from .types import DataChunk


@dataclass
class TrainReport:
    examples_seen: int
    update_count: int
    online_error_rate: float
    elapsed_seconds: float
    final_nnz: int
    dimension: int = 0
    skipped_lines: int = 0

    def summary_lines(self):
        return [
            f"training examples: {self.examples_seen}",
            f"updates: {self.update_count}",
            f"online error rate: {self.online_error_rate:.4f}",
            f"model nnz: {self.final_nnz}",
            f"dimension: {self.dimension}",
        ]


@dataclass
class ParamGrid:
    name: str
    values: list

    def __post_init__(self):
        if not self.values:
            raise ConfigError("empty parameter grid")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("grid values must be strictly ascending")


def parse_grid(spec, name="") -> ParamGrid:
    """Expand "start:factor:end" into a geometric grid, end inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"bad grid spec {spec!r}, expected start:factor:end")
    try:
        start, factor, end = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad grid spec {spec!r}")
    if start <= 0.0:
        raise ConfigError("grid start must be > 0")
    if factor <= 1.0:
        raise ConfigError("grid factor must be > 1")
    if end < start:
        raise ConfigError("grid end must be >= start")
    values = []
    v = start
    limit = end * (1.0 + 1e-12)
    while v <= limit:
        values.append(v)
        v *= factor
    return ParamGrid(name, values)


class MemoryDataset:
    """All examples of a source held as one CSR block.

    Used by cross-validation, which needs random-access fold views; the
    chunk iterator can follow an arbitrary example order.
    """

    def __init__(self, labels, indptr, indices, values):
        self.labels = labels
        self.indptr = indptr
        self.indices = indices
        self.values = values
        self.max_index = int(indices.max()) if indices.size else -1

    def __len__(self):
        return int(self.labels.size)

    @classmethod
    def from_source(cls, source, chunk_size=DEFAULT_CHUNK_SIZE, **kw):
        chunks = list(pipeline_load(source, chunk_size, **kw))
        if not chunks:
            return cls(np.empty(0, np.int64), np.zeros(1, np.int64),
                       np.empty(0, np.int64), np.empty(0, np.float64))
        labels = np.concatenate([c.labels for c in chunks])
        indices = np.concatenate([c.indices for c in chunks])
        values = np.concatenate([c.values for c in chunks])
        counts = np.concatenate([np.diff(c.indptr) for c in chunks])
        indptr = np.zeros(labels.size + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(counts)
        return cls(labels, indptr, indices, values)

    def subset(self, order):
        """CSR copy holding the examples listed in `order`, in that order."""
        order = np.asarray(order, dtype=np.int64)
        starts = self.indptr[order]
        lens = self.indptr[order + 1] - starts
        indptr = np.zeros(order.size + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(lens)
        total = int(indptr[-1])
        pos = np.arange(total, dtype=np.int64)
        pos += np.repeat(starts - indptr[:-1], lens)
        return MemoryDataset(self.labels[order], indptr,
                             self.indices[pos], self.values[pos])

    def iter_chunks(self, chunk_size=DEFAULT_CHUNK_SIZE):
        n = len(self)
        for seq, lo in enumerate(range(0, n, chunk_size)):
            hi = min(lo + chunk_size, n)
            a, b = self.indptr[lo], self.indptr[hi]
            yield DataChunk(
                seq,
                self.labels[lo:hi],
                self.indptr[lo: hi + 1] - a,
                self.indices[a:b],
                self.values[a:b],
            )


def _chunk_stream(source, chunk_size, buffer_chunks, parse_workers,
                  skip_bad_lines):
    if isinstance(source, MemoryDataset):
        return source.iter_chunks(chunk_size)
    if isinstance(source, (str, DataSource)):
        return pipeline_load(source, chunk_size, buffer_chunks,
                             parse_workers, skip_bad_lines)
    raise SolError(f"cannot read from {type(source).__name__}")


def train_online(model, source, passes=1, chunk_size=DEFAULT_CHUNK_SIZE,
                 buffer_chunks=DEFAULT_BUFFER_CHUNKS, parse_workers=None,
                 skip_bad_lines=False) -> TrainReport:
    """Run the online predict/update loop over the source, in order.

    After the final pass all pending lazy regularization is flushed so
    model.weights holds the materialized vector.
    """
    if passes < 1:
        raise ConfigError("passes must be >= 1")
    algo = model.algorithm
    examples = 0
    updates = 0
    mistakes = 0
    skipped = 0
    start = time.perf_counter()
    for _ in range(passes):
        stream = _chunk_stream(source, chunk_size, buffer_chunks,
                               parse_workers, skip_bad_lines)
        try:
            for chunk in stream:
                model.ensure_capacity(chunk.max_index + 1)
                e, u, m = algo.process_chunk(model, chunk)
                examples += e
                updates += u
                mistakes += m
        finally:
            if isinstance(stream, Pipeline):
                skipped += stream.skipped_lines
                stream.close()
    algo.flush(model)
    if examples == 0:
        raise SolError(f"empty source: no examples in {getattr(source, 'path', source)}")
    elapsed = time.perf_counter() - start
    return TrainReport(
        examples_seen=examples,
        update_count=updates,
        online_error_rate=mistakes / examples,
        elapsed_seconds=elapsed,
        final_nnz=model.nnz(),
        dimension=model.dim,
        skipped_lines=skipped,
    )


def evaluate(model, source, chunk_size=DEFAULT_CHUNK_SIZE,
             buffer_chunks=DEFAULT_BUFFER_CHUNKS, parse_workers=None):
    """(accuracy, predicted labels) for a labeled source."""
    if isinstance(source, (str, DataSource)):
        if not isinstance(source, DataSource):
            source = DataSource(source)
        source = DataSource(source.path, source.format, model.class_count)
    algo = model.algorithm
    correct = 0
    total = 0
    predictions = []
    stream = _chunk_stream(source, chunk_size, buffer_chunks, None, False)
    try:
        for chunk in stream:
            for i in range(len(chunk)):
                idx, vals, label = chunk.row(i)
                idx, vals = model.augment(idx, vals)
                s = algo.scores(model, idx, vals)
                if model.class_count == 2:
                    pred = 1 if s[0] > 0.0 else 0
                else:
                    pred = int(np.argmax(s))
                predictions.append(pred)
                correct += pred == label
                total += 1
    except LabelError as exc:
        raise EvaluationError(str(exc))
    finally:
        if isinstance(stream, Pipeline):
            stream.close()
    if total == 0:
        raise SolError("empty source: nothing to evaluate")
    return correct / total, predictions


def format_accuracy(accuracy):
    return f"test accuracy: {accuracy:.4f}"


def format_cv_params(best):
    return f"cross validation parameters: {best!r}"


def cross_validate(algo_name, grids, source, folds=5, seed=0, class_count=2,
                   loss=None, bias=False, base_params=None, passes=1,
                   chunk_size=DEFAULT_CHUNK_SIZE):
    """Pick the best grid point by mean validation accuracy over k folds.

    The example order is shuffled once with the given seed, folds are
    contiguous blocks of the shuffled order, and ties break toward the
    earliest point in lexicographic grid order. Returns
    (best_pairs, results) where best_pairs is a list of (name, value)
    tuples and results maps each grid tuple to its mean accuracy.
    """
    from .model import create_model

    if folds < 2:
        raise ConfigError("folds must be >= 2")
    if not grids:
        raise ConfigError("no parameter grids given")
    if isinstance(source, MemoryDataset):
        data = source
    else:
        if not isinstance(source, DataSource):
            source = DataSource(source)
        source = DataSource(source.path, source.format, class_count)
        data = MemoryDataset.from_source(source, chunk_size)
    n = len(data)
    if n < folds:
        raise SolError(f"{n} examples cannot fill {folds} folds")

    order = np.random.default_rng(seed).permutation(n)
    bounds = [round(f * n / folds) for f in range(folds + 1)]
    fold_sets = []
    for f in range(folds):
        val_idx = order[bounds[f]: bounds[f + 1]]
        train_idx = np.concatenate((order[: bounds[f]], order[bounds[f + 1]:]))
        fold_sets.append((data.subset(train_idx), data.subset(val_idx)))

    names = [g.name for g in grids]
    best_point = None
    best_acc = -1.0
    results = {}
    for point in itertools.product(*(g.values for g in grids)):
        params = dict(base_params or {})
        params.update(zip(names, point))
        accs = []
        for train_set, val_set in fold_sets:
            model = create_model(algo_name, class_count, params, loss, bias)
            train_online(model, train_set, passes=passes, chunk_size=chunk_size)
            acc, _ = evaluate(model, val_set, chunk_size=chunk_size)
            accs.append(acc)
        mean_acc = float(np.mean(accs))
        results[point] = mean_acc
        if mean_acc > best_acc:
            best_acc = mean_acc
            best_point = point
    best = list(zip(names, best_point))
    return best, results
