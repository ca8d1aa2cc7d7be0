"""Text parsers (libsvm, csv) producing CSR chunks or Example objects.

Labels: binary sources accept {+1,-1} (mapped to classes {1,0}) as well
as {0,1}; multi-class sources require integer class ids 0..C-1. Feature
values are quantized to float32 precision so that text- and binary-cache
training streams are bitwise identical.
"""

import csv
import os
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ParseError
from ..types import DataChunk, Example, SparseVector, quantize_f32, sparse_from_pairs

LIBSVM = "libsvm"
CSV = "csv"
BINARY = "binary"

_EXT_FORMATS = {".libsvm": LIBSVM, ".txt": LIBSVM, ".csv": CSV, ".bin": BINARY}


class LabelError(ParseError):
    """Label outside the declared class range."""


@dataclass
class DataSource:
    """A training or test file plus how to read it."""

    path: str
    format: str = None
    class_count: int = 2

    def __post_init__(self):
        if self.format is None:
            ext = os.path.splitext(self.path)[1].lower()
            self.format = _EXT_FORMATS.get(ext, LIBSVM)
        if self.format not in (LIBSVM, CSV, BINARY):
            raise ConfigError(f"unknown data format {self.format!r}")
        if self.class_count < 2:
            raise ConfigError("class_count must be >= 2")


def _map_label(token, class_count, line_no):
    try:
        label = int(token)
    except ValueError:
        try:
            f = float(token)
        except ValueError:
            raise ParseError(f"bad label {token!r}", line_no)
        if not f.is_integer():
            raise ParseError(f"non-integer label {token!r}", line_no)
        label = int(f)
    if class_count == 2:
        if label == -1:
            return 0
        if label in (0, 1):
            return label
        raise LabelError(f"label {label} invalid for a binary problem", line_no)
    if 0 <= label < class_count:
        return label
    raise LabelError(
        f"label {label} outside class range 0..{class_count - 1}", line_no
    )


def parse_libsvm_line(line, class_count=2, line_no=None) -> Example:
    """Parse one "label idx:val ..." line into a canonical Example."""
    line = line.split("#", 1)[0]
    tokens = line.split()
    if not tokens:
        raise ParseError("empty line", line_no)
    label = _map_label(tokens[0], class_count, line_no)
    pairs = []
    for tok in tokens[1:]:
        i, sep, v = tok.partition(":")
        if not sep:
            raise ParseError(f"malformed feature pair {tok!r}", line_no)
        try:
            index = int(i)
            value = float(v)
        except ValueError:
            raise ParseError(f"malformed feature pair {tok!r}", line_no)
        if index < 0:
            raise ParseError(f"negative feature index {index}", line_no)
        pairs.append((index, value))
    vec = sparse_from_pairs(pairs)
    vec = SparseVector(vec.indices, quantize_f32(vec.values))
    keep = vec.values != 0.0
    if not keep.all():
        vec = SparseVector(vec.indices[keep], vec.values[keep])
    return Example(vec, label)


def parse_libsvm_batch(lines, first_line_no, class_count, skip_bad=False):
    """Parse a batch of lines into CSR arrays.

    Returns (labels, indptr, indices, values, skipped). Blank and
    comment-only lines are not examples and are dropped silently; bad
    lines raise ParseError unless skip_bad, in which case they are
    counted.
    """
    labels = []
    indptr = [0]
    idx_out = []
    val_out = []
    skipped = 0
    for off, line in enumerate(lines):
        line_no = first_line_no + off
        text = line.split("#", 1)[0]
        tokens = text.split()
        if not tokens:
            continue
        try:
            label = _map_label(tokens[0], class_count, line_no)
            row_idx = []
            row_val = []
            prev = -1
            canonical = True
            for tok in tokens[1:]:
                i, sep, v = tok.partition(":")
                if not sep:
                    raise ParseError(f"malformed feature pair {tok!r}", line_no)
                try:
                    index = int(i)
                    value = float(v)
                except ValueError:
                    raise ParseError(f"malformed feature pair {tok!r}", line_no)
                if index < 0:
                    raise ParseError(f"negative feature index {index}", line_no)
                if index <= prev:
                    canonical = False
                prev = index
                row_idx.append(index)
                row_val.append(value)
            if not canonical:
                vec = sparse_from_pairs(list(zip(row_idx, row_val)))
                row_idx = vec.indices.tolist()
                row_val = vec.values.tolist()
        except ParseError:
            if skip_bad:
                skipped += 1
                continue
            raise
        labels.append(label)
        idx_out.extend(row_idx)
        val_out.extend(row_val)
        indptr.append(len(idx_out))
    values = quantize_f32(np.asarray(val_out, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(idx_out, dtype=np.int64)
    if values.size and not values.all():
        indices, values, indptr = _drop_zeros(indices, values, indptr)
    return labels, indptr, indices, values, skipped


def _drop_zeros(indices, values, indptr):
    """Remove entries that quantized to exactly zero, fixing indptr."""
    keep = values != 0.0
    counts = np.diff(indptr)
    drop_counts = np.zeros(counts.size, dtype=np.int64)
    pos = 0
    zero_mask = ~keep
    for row in range(counts.size):
        n = counts[row]
        if n:
            drop_counts[row] = int(zero_mask[pos: pos + n].sum())
            pos += n
    new_indptr = np.zeros_like(indptr)
    new_indptr[1:] = np.cumsum(counts - drop_counts)
    return indices[keep], values[keep], new_indptr


def _csv_chunks(reader, class_count, chunk_size, skip_bad=False):
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty csv file: missing header", 1)
    label_col = header.index("label") if "label" in header else 0
    width = len(header)
    feature_cols = [j for j in range(width) if j != label_col]

    labels, indptr, idx_out, val_out = [], [0], [], []
    skipped = 0

    def take():
        nonlocal labels, indptr, idx_out, val_out, skipped
        values = quantize_f32(np.asarray(val_out, dtype=np.float64))
        indices = np.asarray(idx_out, dtype=np.int64)
        ip = np.asarray(indptr, dtype=np.int64)
        if values.size and not values.all():
            indices, values, ip = _drop_zeros(indices, values, ip)
        out = (np.asarray(labels, dtype=np.int64), ip, indices, values, skipped)
        labels, indptr, idx_out, val_out = [], [0], [], []
        skipped = 0
        return out

    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            if len(row) != width:
                raise ParseError(
                    f"ragged row: expected {width} columns, got {len(row)}",
                    row_no,
                )
            label = _map_label(row[label_col], class_count, row_no)
            row_idx, row_val = [], []
            for fid, j in enumerate(feature_cols, start=1):
                try:
                    v = float(row[j])
                except ValueError:
                    raise ParseError(f"bad value {row[j]!r}", row_no)
                if v != 0.0:
                    row_idx.append(fid)
                    row_val.append(v)
        except ParseError:
            if skip_bad:
                skipped += 1
                continue
            raise
        labels.append(label)
        idx_out.extend(row_idx)
        val_out.extend(row_val)
        indptr.append(len(idx_out))
        if len(labels) >= chunk_size:
            yield take()
    if labels or skipped:
        yield take()


def iter_csv_chunks(path, class_count, chunk_size, skip_bad=False):
    """Stream a headered csv file as CSR chunk tuples.

    One column named "label" (or the first column as fallback) supplies
    labels; the remaining columns are dense features with ids 1..d in
    column order. Yields (labels, indptr, indices, values, skipped).
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        yield from _csv_chunks(csv.reader(fh), class_count, chunk_size, skip_bad)


def parse_csv(stream, class_count=2):
    """Parse a csv text stream into a list of Examples."""
    import io

    if isinstance(stream, str):
        stream = io.StringIO(stream)
    out = []
    for labels, indptr, indices, values, _ in _csv_chunks(
        csv.reader(stream), class_count, chunk_size=4096
    ):
        out.extend(DataChunk(0, labels, indptr, indices, values).examples)
    return out


def write_libsvm(examples, path, class_count=2):
    """Write examples as libsvm text; binary labels render as +/-1."""
    with open(path, "w", encoding="ascii") as fh:
        for ex in examples:
            if class_count == 2:
                token = "+1" if ex.label == 1 else "-1"
            else:
                token = str(ex.label)
            pairs = " ".join(
                f"{i}:{v!r}" for i, v in zip(ex.features.indices.tolist(),
                                             ex.features.values.tolist())
            )
            fh.write(f"{token} {pairs}".rstrip() + "\n")
