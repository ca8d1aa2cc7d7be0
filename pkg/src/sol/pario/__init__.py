"""Streaming IO: text parsers, the SOLB binary cache, and the load pipeline."""

from .binary import iter_binary_chunks, read_binary, write_binary, write_binary_chunks
from .formats import (
    BINARY,
    CSV,
    LIBSVM,
    DataSource,
    LabelError,
    parse_csv,
    parse_libsvm_line,
    write_libsvm,
)
from .pipeline import (
    DEFAULT_BUFFER_CHUNKS,
    DEFAULT_CHUNK_SIZE,
    Pipeline,
    pipeline_load,
)
