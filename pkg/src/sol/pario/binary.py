"""The "SOLB" binary cache format.

Layout (little-endian throughout):
  header   magic b"SOLB" | u32 version = 1 | u64 example_count
  record   zigzag-varint label | varint nnz | varint first index
           | varint index gaps (nnz-1 of them, all >= 1)
           | nnz float32 values

The example_count is back-patched after streaming. Decoding runs in a
numba kernel over raw byte buffers so binary reads keep up with the
learner; truncated or damaged input surfaces as CorruptionError with a
byte offset, never as a crash or a silent short read.
"""

import struct

import numpy as np
from numba import njit

from ..errors import CorruptionError, FormatError
from ..types import DataChunk, Example, SparseVector
from .formats import LabelError

MAGIC = b"SOLB"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")
HEADER_SIZE = _HEADER.size

# ids beyond this are treated as corruption rather than allocated
MAX_FEATURE_ID = 1 << 40

_OK = 0
_NEED_MORE = 1
_CORRUPT = 2


@njit(cache=True, nogil=True, inline="always")
def _write_varint(out, pos, n):
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out[pos] = b | 0x80
        else:
            out[pos] = b
            return pos + 1
        pos += 1


@njit(cache=True, nogil=True)
def _encode_records(labels, indptr, indices, raw_u32, out):
    """Encode CSR rows into `out`; returns the number of bytes written."""
    pos = 0
    for i in range(labels.size):
        label = labels[i]
        zz = (label << 1) ^ (label >> 63)
        pos = _write_varint(out, pos, zz)
        lo = indptr[i]
        hi = indptr[i + 1]
        pos = _write_varint(out, pos, hi - lo)
        prev = np.int64(0)
        for j in range(lo, hi):
            pos = _write_varint(out, pos, indices[j] - prev)
            prev = indices[j]
        for j in range(lo, hi):
            v = raw_u32[j]
            out[pos] = v & 0xFF
            out[pos + 1] = (v >> 8) & 0xFF
            out[pos + 2] = (v >> 16) & 0xFF
            out[pos + 3] = (v >> 24) & 0xFF
            pos += 4
    return pos


def _encode_chunk(labels, indptr, indices, values):
    raw = np.asarray(values, dtype="<f4").view(np.uint32)
    # worst case: 20 varint bytes per record header, 10 per index + 4 per value
    cap = 20 * labels.size + 14 * indices.size + 16
    out = np.empty(cap, dtype=np.uint8)
    n = _encode_records(labels, indptr, indices, raw, out)
    return out[:n].tobytes()


def write_binary(examples, path):
    """Stream examples to a SOLB file; returns the number written."""
    from ..types import chunk_from_examples

    def chunks():
        batch = []
        for ex in examples:
            batch.append(ex)
            if len(batch) >= 4096:
                yield chunk_from_examples(0, batch)
                batch = []
        if batch:
            yield chunk_from_examples(0, batch)

    return write_binary_chunks(chunks(), path)


def write_binary_chunks(chunks, path):
    """Stream DataChunks to a SOLB file; returns the number written."""
    count = 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, 0))
        for chunk in chunks:
            if len(chunk):
                fh.write(_encode_chunk(chunk.labels, chunk.indptr,
                                       chunk.indices, chunk.values))
            count += len(chunk)
        fh.seek(4 + 4)
        fh.write(struct.pack("<Q", count))
    return count


@njit(cache=True, nogil=True, inline="always")
def _read_varint(buf, pos):
    """Returns (value, new_pos, status). status: 0 ok, 1 ran out, 2 corrupt."""
    out = 0
    shift = 0
    n = buf.size
    for _ in range(10):
        if pos >= n:
            return 0, pos, _NEED_MORE
        b = buf[pos]
        pos += 1
        if shift >= 63:
            return 0, pos, _CORRUPT
        out |= np.int64(b & 0x7F) << shift
        if b < 0x80:
            return out, pos, _OK
        shift += 7
    return 0, pos, _CORRUPT


@njit(cache=True, nogil=True)
def _decode_records(buf, start, max_records, labels, indptr, indices, raw_u32):
    """Decode up to max_records records from buf[start:].

    Returns (n_records, n_indices, next_offset, status, err_offset).
    next_offset points at the first undecoded byte (the start of the
    partial record when status is NEED_MORE).
    """
    pos = start
    n = 0
    ip = 0
    indptr[0] = 0
    size = buf.size
    while n < max_records:
        if pos >= size:
            return n, ip, pos, _OK, -1
        rec_start = pos
        zz, pos, st = _read_varint(buf, pos)
        if st != _OK:
            return n, ip, rec_start, st, rec_start
        label = (zz >> 1) ^ -(zz & 1)
        nnz, pos, st = _read_varint(buf, pos)
        if st != _OK:
            return n, ip, rec_start, st, rec_start
        if nnz < 0 or ip + nnz > indices.size:
            # cannot fit in a buffer this size; either truncated or bogus
            return n, ip, rec_start, _NEED_MORE, rec_start
        prev = np.int64(0)
        for j in range(nnz):
            gap, pos, st = _read_varint(buf, pos)
            if st != _OK:
                return n, ip, rec_start, st, rec_start
            if j == 0:
                prev = gap
            else:
                if gap == 0:
                    return n, ip, rec_start, _CORRUPT, rec_start
                prev = prev + gap
            indices[ip + j] = prev
        if pos + 4 * nnz > size:
            return n, ip, rec_start, _NEED_MORE, rec_start
        for j in range(nnz):
            o = pos + 4 * j
            raw_u32[ip + j] = (np.uint32(buf[o])
                               | np.uint32(buf[o + 1]) << 8
                               | np.uint32(buf[o + 2]) << 16
                               | np.uint32(buf[o + 3]) << 24)
        pos += 4 * nnz
        labels[n] = label
        ip += nnz
        n += 1
        indptr[n] = ip
    return n, ip, pos, _OK, -1


class _BinaryReader:
    """Incremental block reader over a SOLB file."""

    def __init__(self, path, chunk_size, class_count=None, block_size=1 << 20):
        self.path = path
        self.chunk_size = chunk_size
        self.class_count = class_count
        self.block_size = block_size

    def __iter__(self):
        with open(self.path, "rb") as fh:
            head = fh.read(HEADER_SIZE)
            if len(head) < HEADER_SIZE:
                raise CorruptionError("file too short for header", len(head))
            magic, version, declared = _HEADER.unpack(head)
            if magic != MAGIC:
                raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
            if version != VERSION:
                raise FormatError(f"unsupported version {version}")
            base = HEADER_SIZE
            buf = np.empty(0, dtype=np.uint8)
            pos = 0
            total = 0
            seq = 0
            eof = False
            starved = False
            while True:
                if not eof and (starved or buf.size - pos < self.block_size):
                    block = fh.read(self.block_size)
                    if block:
                        buf = np.concatenate(
                            (buf[pos:], np.frombuffer(block, dtype=np.uint8))
                        )
                        base += pos
                        pos = 0
                        starved = False
                    else:
                        eof = True
                cap = max(self.chunk_size, 1)
                labels = np.empty(cap, dtype=np.int64)
                indptr = np.empty(cap + 1, dtype=np.int64)
                icap = (buf.size - pos) // 5 + 1
                indices = np.empty(icap, dtype=np.int64)
                raw = np.empty(icap, dtype=np.uint32)
                n, ip, nxt, status, err = _decode_records(
                    buf, pos, cap, labels, indptr, indices, raw
                )
                if status == _CORRUPT:
                    raise CorruptionError("damaged record", base + err)
                if status == _NEED_MORE:
                    if eof:
                        raise CorruptionError("truncated record", base + err)
                    starved = True
                if n:
                    total += n
                    if total > declared:
                        raise CorruptionError(
                            f"more records than the declared {declared}",
                            base + pos,
                        )
                    if labels[:n].min() < 0:
                        raise CorruptionError("negative label", base + pos)
                    if ip and not (0 <= indices[:ip].min()
                                   and indices[:ip].max() < MAX_FEATURE_ID):
                        raise CorruptionError("feature id out of range",
                                              base + pos)
                    if self.class_count is not None and (
                        labels[:n].max() >= self.class_count
                    ):
                        raise LabelError(
                            f"label {int(labels[:n].max())} outside class range "
                            f"0..{self.class_count - 1} (record {total})"
                        )
                    values = raw[:ip].view("<u4").view(np.float32).astype(np.float64)
                    yield DataChunk(
                        seq,
                        labels[:n].copy(),
                        indptr[: n + 1].copy(),
                        indices[:ip].copy(),
                        values,
                    )
                    seq += 1
                pos = nxt
                if eof and status == _OK and pos >= buf.size:
                    break
            if total != declared:
                raise CorruptionError(
                    f"expected {declared} records, found {total}", base + pos
                )


def iter_binary_chunks(path, chunk_size=1024, class_count=None):
    return iter(_BinaryReader(path, chunk_size, class_count))


def read_binary(path, class_count=None):
    """Yield Examples from a SOLB file (inverse of write_binary)."""
    for chunk in iter_binary_chunks(path, class_count=class_count):
        for i in range(len(chunk)):
            idx, vals, label = chunk.row(i)
            yield Example(SparseVector(idx.copy(), vals.copy()), label)
