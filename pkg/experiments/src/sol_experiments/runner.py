"""Subprocess plumbing around the sol_train / sol_test command line.

The orchestrator deliberately talks to the trainer only through its CLI
and file formats, so benchmarks exercise exactly what a user ships.
"""

import re
import shutil
import subprocess
import sys
from dataclasses import dataclass


def _cmd(script, module_verb):
    path = shutil.which(script)
    if path:
        return [path]
    return [sys.executable, "-m", "sol.cli", module_verb]


def train_cmd():
    return _cmd("sol_train", "train")


def test_cmd():
    return _cmd("sol_test", "test")


@dataclass
class TrainResult:
    returncode: int
    nnz: int = None
    dimension: int = None
    elapsed: float = None
    stdout: str = ""
    stderr: str = ""


@dataclass
class TestResult:
    returncode: int
    accuracy: float = None
    stdout: str = ""
    stderr: str = ""


_NNZ = re.compile(r"^model nnz: (\d+)$", re.M)
_DIM = re.compile(r"^dimension: (\d+)$", re.M)
_ELAPSED = re.compile(r"^elapsed: ([0-9.]+)s$", re.M)
_ACC = re.compile(r"^test accuracy: ([0-9.]+)$", re.M)


def run_train(train_file, model_file, algo, params=None, extra=None,
              timeout=600):
    argv = list(train_cmd()) + ["-a", algo]
    if params:
        joined = ",".join(f"{k}={v}" for k, v in params.items())
        argv += ["--params", joined]
    argv += list(extra or [])
    argv += [str(train_file), str(model_file)]
    proc = subprocess.run(argv, capture_output=True, text=True,
                          timeout=timeout)
    result = TrainResult(proc.returncode, stdout=proc.stdout,
                         stderr=proc.stderr)
    if proc.returncode == 0:
        m = _NNZ.search(proc.stdout)
        result.nnz = int(m.group(1)) if m else None
        m = _DIM.search(proc.stdout)
        result.dimension = int(m.group(1)) if m else None
        m = _ELAPSED.search(proc.stderr)
        result.elapsed = float(m.group(1)) if m else None
    return result


def run_test(model_file, test_file, timeout=600):
    argv = list(test_cmd()) + [str(model_file), str(test_file)]
    proc = subprocess.run(argv, capture_output=True, text=True,
                          timeout=timeout)
    result = TestResult(proc.returncode, stdout=proc.stdout,
                        stderr=proc.stderr)
    if proc.returncode == 0:
        m = _ACC.search(proc.stdout)
        result.accuracy = float(m.group(1)) if m else None
    return result


def dataset_dimension(path):
    """Highest feature id in a libsvm file (the sweep's fixed d)."""
    top = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            for tok in line.split()[1:]:
                idx = tok.split(":", 1)[0]
                try:
                    top = max(top, int(idx))
                except ValueError:
                    continue
    return top
