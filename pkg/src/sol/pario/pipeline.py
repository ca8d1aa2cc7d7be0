"""Bounded producer/consumer pipeline delivering DataChunks in file order.

One reader stage feeds a bounded queue (back-pressure when the consumer
lags); libsvm line batches are parsed by a small thread pool, but chunks
are always handed to the single consumer strictly in source order. Parse
and IO errors surface on the consumer side; with skip_bad_lines the
pipeline counts and drops bad lines instead.

Consumers should exhaust the stream, call close(), or use the pipeline
as a context manager; an abandoned pipeline also shuts its reader down
when garbage-collected (the reader holds no reference back to it).
"""

import os
import queue
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..errors import SolError
from ..types import DataChunk
from .binary import _BinaryReader
from .formats import BINARY, CSV, LIBSVM, DataSource, iter_csv_chunks, parse_libsvm_batch

_DONE = object()

DEFAULT_CHUNK_SIZE = 1024
DEFAULT_BUFFER_CHUNKS = 16


def default_parse_workers():
    return min(4, os.cpu_count() or 1)


@dataclass
class _ReaderState:
    """Everything the reader thread touches; holds no Pipeline reference."""

    source: DataSource
    chunk_size: int
    parse_workers: int
    skip_bad_lines: bool
    out: queue.Queue
    stop: threading.Event
    produced: int = 0
    pool: ThreadPoolExecutor = None

    def put(self, item):
        while not self.stop.is_set():
            try:
                self.out.put(item, timeout=0.05)
                self.produced += 1
                return True
            except queue.Full:
                continue
        return False

    def run(self):
        try:
            if self.source.format == LIBSVM:
                self._read_libsvm()
            elif self.source.format == CSV:
                self._read_csv()
            elif self.source.format == BINARY:
                self._read_binary()
        except BaseException as exc:  # surface on the consumer side
            self.put(exc)
            return
        finally:
            if self.pool is not None:
                self.pool.shutdown(wait=False)
        self.put(_DONE)

    def _read_libsvm(self):
        cc = self.source.class_count
        skip = self.skip_bad_lines

        def parse(lines, first_no):
            labels, indptr, indices, values, skipped = parse_libsvm_batch(
                lines, first_no, cc, skip
            )
            return DataChunk(0, labels, indptr, indices, values), skipped

        self.pool = ThreadPoolExecutor(max_workers=self.parse_workers)
        with open(self.source.path, "r", encoding="utf-8",
                  errors="replace") as fh:
            batch = []
            first_no = 1
            line_no = 0
            for line in fh:
                line_no += 1
                batch.append(line)
                if len(batch) >= self.chunk_size:
                    if not self.put(self.pool.submit(parse, batch, first_no)):
                        return
                    batch = []
                    first_no = line_no + 1
            if batch:
                self.put(self.pool.submit(parse, batch, first_no))

    def _read_csv(self):
        for labels, indptr, indices, values, skipped in iter_csv_chunks(
            self.source.path, self.source.class_count, self.chunk_size,
            self.skip_bad_lines,
        ):
            chunk = DataChunk(0, labels, indptr, indices, values)
            if not self.put((chunk, skipped)):
                return

    def _read_binary(self):
        reader = _BinaryReader(
            self.source.path, self.chunk_size, self.source.class_count
        )
        for chunk in reader:
            if not self.put((chunk, 0)):
                return


class Pipeline:
    """Iterator over DataChunks with a bounded internal buffer."""

    def __init__(self, source, chunk_size=DEFAULT_CHUNK_SIZE,
                 buffer_chunks=DEFAULT_BUFFER_CHUNKS, parse_workers=None,
                 skip_bad_lines=False):
        if chunk_size < 1:
            raise SolError("chunk_size must be >= 1")
        if buffer_chunks < 1:
            raise SolError("buffer_chunks must be >= 1")
        self.skipped_lines = 0
        self._state = _ReaderState(
            source=source,
            chunk_size=chunk_size,
            parse_workers=parse_workers or default_parse_workers(),
            skip_bad_lines=skip_bad_lines,
            out=queue.Queue(maxsize=buffer_chunks),
            stop=threading.Event(),
        )
        self._reader = threading.Thread(target=self._state.run, daemon=True)
        self._seq = 0
        self._started = False
        self._finished = False

    def __iter__(self):
        return self

    def __next__(self):
        if self._finished:
            raise StopIteration
        if not self._started:
            self._started = True
            self._reader.start()
        while True:
            item = self._state.out.get()
            if item is _DONE:
                self._finished = True
                raise StopIteration
            if isinstance(item, BaseException):
                self._finished = True
                self.close()
                raise item
            chunk, skipped = self._resolve(item)
            self.skipped_lines += skipped
            if len(chunk) == 0:
                continue
            chunk.sequence_id = self._seq
            self._seq += 1
            return chunk

    def _resolve(self, item):
        if isinstance(item, tuple):
            return item
        # a parse future; raises the worker's ParseError here
        try:
            return item.result()
        except BaseException:
            self._finished = True
            self.close()
            raise

    def close(self):
        state = self._state
        state.stop.set()
        if state.pool is not None:
            state.pool.shutdown(wait=False, cancel_futures=True)
        # unblock the reader if it is waiting on a full queue
        while True:
            try:
                state.out.get_nowait()
            except queue.Empty:
                break

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self._state.stop.set()
        except AttributeError:
            pass

    @property
    def _produced(self):
        return self._state.produced


def pipeline_load(source, chunk_size=DEFAULT_CHUNK_SIZE,
                  buffer_chunks=DEFAULT_BUFFER_CHUNKS, parse_workers=None,
                  skip_bad_lines=False) -> Pipeline:
    """Open an ordered, back-pressured chunk stream over a DataSource."""
    if not isinstance(source, DataSource):
        source = DataSource(source)
    return Pipeline(source, chunk_size, buffer_chunks, parse_workers,
                    skip_bad_lines)
