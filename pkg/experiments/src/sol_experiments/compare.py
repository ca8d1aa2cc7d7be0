"""Algorithm comparison: train time and accuracy over shuffled repeats."""

import csv
import statistics
import tempfile
from pathlib import Path

from .runner import run_test, run_train
from .synth import shuffle_lines

COMPARE_COLUMNS = ("algo", "repeats", "seeds", "train_time_mean",
                   "train_time_std", "accuracy_mean", "accuracy_std")


def compare_algorithms(train_file, test_file, algos, repeats=3, seed0=0,
                       params=None, out_csv="compare.csv"):
    """Per algorithm: mean and std of train time and test accuracy over
    repeats, each repeat training on a seed-shuffled copy of the data.
    Failed runs leave empty cells; the comparison continues.
    """
    rows = []
    seeds = [seed0 + r for r in range(repeats)]
    with tempfile.TemporaryDirectory(prefix="sol-compare-") as workdir:
        shuffled = []
        for s in seeds:
            dst = Path(workdir) / f"shuffle-{s}.libsvm"
            shuffle_lines(train_file, dst, s)
            shuffled.append(dst)
        for algo in algos:
            times = []
            accs = []
            failed = False
            for s, data in zip(seeds, shuffled):
                model = Path(workdir) / f"{algo}-{s}.model"
                tr = run_train(data, model, algo, (params or {}).get(algo))
                if tr.returncode != 0 or tr.elapsed is None:
                    failed = True
                    break
                te = run_test(model, test_file)
                if te.returncode != 0:
                    failed = True
                    break
                times.append(tr.elapsed)
                accs.append(te.accuracy)
            if failed:
                rows.append({"algo": algo, "repeats": repeats,
                             "seeds": ";".join(map(str, seeds)),
                             "train_time_mean": "", "train_time_std": "",
                             "accuracy_mean": "", "accuracy_std": ""})
                continue
            tstd = statistics.pstdev(times) if len(times) > 1 else 0.0
            astd = statistics.pstdev(accs) if len(accs) > 1 else 0.0
            rows.append({
                "algo": algo,
                "repeats": repeats,
                "seeds": ";".join(map(str, seeds)),
                "train_time_mean": f"{statistics.mean(times):.4f}",
                "train_time_std": f"{tstd:.4f}",
                "accuracy_mean": f"{statistics.mean(accs):.4f}",
                "accuracy_std": f"{astd:.4f}",
            })
    with open(out_csv, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=COMPARE_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return out_csv
