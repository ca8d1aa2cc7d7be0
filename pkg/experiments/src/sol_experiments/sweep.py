"""Lambda sweeps: model sparsity vs test accuracy per algorithm."""

import csv
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .runner import dataset_dimension, run_test, run_train

SWEEP_COLUMNS = ("algo", "lambda", "sparsity", "accuracy")


def _sweep_cell(train_file, test_file, algo, lam, dimension, workdir):
    model = Path(workdir) / f"{algo}-{lam}.model"
    params = {} if lam is None else {"lambda": lam}
    tr = run_train(train_file, model, algo, params)
    if tr.returncode != 0:
        return {"algo": algo, "lambda": lam, "sparsity": "", "accuracy": ""}
    te = run_test(model, test_file)
    if te.returncode != 0:
        return {"algo": algo, "lambda": lam, "sparsity": "", "accuracy": ""}
    sparsity = 1.0 - tr.nnz / dimension
    return {"algo": algo, "lambda": lam, "sparsity": f"{sparsity:.6f}",
            "accuracy": f"{te.accuracy:.4f}"}


def sweep_sparsity(train_file, test_file, algos, lambda_grid, out_csv,
                   jobs=1):
    """Train every (algo, lambda) cell, recording sparsity = 1 - nnz/d
    and holdout accuracy. Failed cells keep their row with empty values
    and the sweep continues.
    """
    dimension = dataset_dimension(train_file)
    rows = []
    with tempfile.TemporaryDirectory(prefix="sol-sweep-") as workdir:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(_sweep_cell, train_file, test_file, algo,
                                lam, dimension, workdir)
                    for algo in algos for lam in lambda_grid
                ]
                rows = [f.result() for f in futures]
        else:
            for algo in algos:
                for lam in lambda_grid:
                    rows.append(_sweep_cell(train_file, test_file, algo,
                                            lam, dimension, workdir))
    with open(out_csv, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return out_csv
