"""Benchmark orchestration for the sol online-learning command line."""

from .compare import COMPARE_COLUMNS, compare_algorithms
from .plots import plot_compare, plot_sweep
from .sweep import SWEEP_COLUMNS, sweep_sparsity
