"""sol: scalable online learning for sparse linear classification.

A family of regular and sparse online learners for binary and
multi-class problems, with streaming libsvm/csv ingestion, a binary
cache format, a parallel load pipeline, and grid cross-validation.
"""

__version__ = "0.1.0"

from .algorithms import ALGORITHMS, algorithm_names, get_algorithm
from .errors import (
    ConfigError,
    CorruptionError,
    EvaluationError,
    FormatError,
    ModelFormatError,
    ParseError,
    SolError,
)
from .evaluation import (
    MemoryDataset,
    ParamGrid,
    TrainReport,
    cross_validate,
    evaluate,
    parse_grid,
    train_online,
)
from .loss import l1_regularized_loss, loss_and_gradscale
from .model import (
    ModelState,
    Prediction,
    create_model,
    effective_weights,
    load_model,
    predict,
    save_model,
)
from .pario import DataSource, pipeline_load, read_binary, write_binary
from .types import DataChunk, Example, SparseVector, dot, sparse_from_pairs
