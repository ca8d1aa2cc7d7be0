"""Model state, prediction, and the text model-file format.

Weight arrays grow on demand as the stream reveals new feature ids.
Binary problems keep a single weight vector (classes encoded as +/-1
internally); multi-class problems keep one per class. Auxiliary arrays
(confidence diagonals, gradient accumulators) live beside the weights and
grow with them.
"""

from dataclasses import dataclass, field

import numpy as np

from .algorithms import get_algorithm
from .errors import ConfigError, ModelFormatError
from .loss import LOSS_KINDS
from .types import SparseVector

_MIN_CAPACITY = 16


@dataclass
class Prediction:
    label: int
    scores: np.ndarray


@dataclass
class ModelState:
    algo_name: str
    class_count: int
    loss_kind: str
    hyper: dict
    bias: bool = False
    t: int = 0
    dim: int = 0
    weights: list = field(default_factory=list)
    aux_vec: dict = field(default_factory=dict)
    aux_scalar: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def n_vectors(self):
        return 1 if self.class_count == 2 else self.class_count

    @property
    def capacity(self):
        return self.weights[0].size

    @property
    def algorithm(self):
        return get_algorithm(self.algo_name)

    def ensure_capacity(self, n):
        """Grow weight and auxiliary arrays to cover feature ids < n."""
        self.dim = max(self.dim, n)
        cap = self.capacity
        if n <= cap:
            return
        new_cap = max(n, 2 * cap)
        algo = self.algorithm
        self.weights = [_grown(w, new_cap, 0.0) for w in self.weights]
        for name, arrays in self.aux_vec.items():
            fill = algo.aux_vectors[name]
            self.aux_vec[name] = [_grown(a, new_cap, fill) for a in arrays]

    def augment(self, idx, vals):
        """Prepend the implicit bias feature (id 0, value 1) when enabled."""
        if not self.bias:
            return idx, vals
        if idx.size and idx[0] == 0:
            raise ConfigError(
                "feature id 0 present in data but reserved for the bias term"
            )
        return (np.concatenate((_BIAS_IDX, idx)),
                np.concatenate((_BIAS_VAL, vals)))

    def nnz(self):
        return int(sum(np.count_nonzero(w) for w in self.weights))


_BIAS_IDX = np.zeros(1, dtype=np.int64)
_BIAS_VAL = np.ones(1, dtype=np.float64)


def _grown(arr, n, fill):
    out = np.full(n, fill, dtype=np.float64)
    out[: arr.size] = arr
    return out


def create_model(algo_name, class_count=2, params=None, loss=None, bias=False):
    """Configure a fresh zero model for the given algorithm."""
    algo = get_algorithm(algo_name)
    if class_count < 2:
        raise ConfigError("class_count must be >= 2")
    hyper = algo.resolve_params(params)
    if loss is None:
        loss = algo.losses[0]
    if loss not in LOSS_KINDS:
        raise ConfigError(f"unknown loss {loss!r}")
    if loss not in algo.losses:
        raise ConfigError(
            f"algorithm {algo_name!r} supports losses {algo.losses}, not {loss!r}"
        )
    model = ModelState(algo_name, class_count, loss, hyper, bias=bias)
    n_vec = model.n_vectors
    model.weights = [np.zeros(_MIN_CAPACITY) for _ in range(n_vec)]
    model.aux_vec = {
        name: [np.full(_MIN_CAPACITY, fill) for _ in range(n_vec)]
        for name, fill in algo.aux_vectors.items()
    }
    model.aux_scalar = dict(algo.aux_scalars)
    return model


def predict(model, x: SparseVector) -> Prediction:
    """Score one example; ties break toward the lowest class id."""
    algo = model.algorithm
    idx, vals = model.augment(x.indices, x.values)
    raw = algo.scores(model, idx, vals)
    if model.class_count == 2:
        s = float(raw[0])
        return Prediction(1 if s > 0.0 else 0, np.array([-s, s]))
    return Prediction(int(np.argmax(raw)), raw)


def effective_weights(model, x: SparseVector):
    """Per-class weight values at x's coordinates with all pending lazy
    regularization applied (read-only)."""
    algo = model.algorithm
    idx = x.indices
    if idx.size and idx[-1] >= model.capacity:
        idx = idx[idx < model.capacity]
    return [algo.effective_values(model, c, idx) for c in range(model.n_vectors)]


# -- model file format ----------------------------------------------------
#
# Six header lines (algo/classes/loss/params/bias/t), then one "w <c>:"
# line of index:value pairs per class, then named auxiliary sections.
# Values use repr() so reloading is bit-exact.

_HEADER_KEYS = ("algo", "classes", "loss", "params", "bias", "t")


def _pairs_line(arr, fill=0.0):
    idx = np.nonzero(arr != fill)[0]
    return " ".join(f"{i}:{float(arr[i])!r}" for i in idx)


def save_model(model, path):
    """Write the model as text; flushes pending lazy updates first."""
    algo = model.algorithm
    algo.flush(model)
    params = ";".join(f"{k}={v!r}" for k, v in sorted(model.hyper.items()))
    lines = [
        f"algo: {model.algo_name}",
        f"classes: {model.class_count}",
        f"loss: {model.loss_kind}",
        f"params: {params}",
        f"bias: {1 if model.bias else 0}",
        f"t: {model.t}",
    ]
    for c in range(model.n_vectors):
        lines.append(f"w {c}: {_pairs_line(model.weights[c])}".rstrip())
    for name in algo.save_vectors:
        fill = algo.aux_vectors[name]
        for c in range(model.n_vectors):
            line = f"aux {name} {c}: {_pairs_line(model.aux_vec[name][c], fill)}"
            lines.append(line.rstrip())
    for name in algo.save_scalars:
        lines.append(f"scalar {name}: {float(model.aux_scalar[name])!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_pairs(text, line_no):
    pairs = []
    for tok in text.split():
        i, _, v = tok.partition(":")
        try:
            index = int(i)
            value = float(v)
        except ValueError:
            raise ModelFormatError(f"line {line_no}: bad index:value pair {tok!r}")
        if index < 0:
            raise ModelFormatError(f"line {line_no}: negative index {index}")
        pairs.append((index, value))
    return pairs


def load_model(path) -> ModelState:
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file: {exc}")
    header = {}
    for line_no, line in enumerate(lines[: len(_HEADER_KEYS)], start=1):
        key, sep, value = line.partition(":")
        if not sep or key not in _HEADER_KEYS:
            raise ModelFormatError(f"line {line_no}: expected header key, got {line!r}")
        header[key] = value.strip()
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise ModelFormatError(f"missing header keys: {missing}")
    try:
        classes = int(header["classes"])
        bias = bool(int(header["bias"]))
        t = int(header["t"])
        params = {}
        if header["params"]:
            for item in header["params"].split(";"):
                k, _, v = item.partition("=")
                params[k] = float(v)
    except ValueError as exc:
        raise ModelFormatError(f"bad header value: {exc}")
    try:
        model = create_model(header["algo"], classes, params, header["loss"], bias)
    except ConfigError as exc:
        raise ModelFormatError(str(exc))
    model.t = t
    algo = model.algorithm

    body = lines[len(_HEADER_KEYS):]
    sections = []
    for off, line in enumerate(body):
        if not line.strip():
            continue
        line_no = off + len(_HEADER_KEYS) + 1
        tag, sep, rest = line.partition(":")
        if not sep:
            raise ModelFormatError(f"line {line_no}: expected a section, got {line!r}")
        sections.append((tag.strip(), rest, line_no))
    by_tag = {tag: (rest, line_no) for tag, rest, line_no in sections}

    for c in range(model.n_vectors):
        tag = f"w {c}"
        if tag not in by_tag:
            raise ModelFormatError(f"missing weight section {tag!r}")
    max_idx = -1
    parsed = {}
    for tag, rest, line_no in sections:
        if tag.startswith("scalar "):
            continue
        pairs = _parse_pairs(rest, line_no)
        if pairs:
            hi = max(i for i, _ in pairs)
            if hi > max_idx:
                max_idx = hi
        parsed[tag] = pairs
    model.ensure_capacity(max_idx + 1)

    for c in range(model.n_vectors):
        for i, v in parsed[f"w {c}"]:
            model.weights[c][i] = v
    for name in algo.save_vectors:
        for c in range(model.n_vectors):
            tag = f"aux {name} {c}"
            for i, v in parsed.get(tag, ()):
                model.aux_vec[name][c][i] = v
    for name in algo.save_scalars:
        tag = f"scalar {name}"
        if tag in by_tag:
            rest, line_no = by_tag[tag]
            try:
                model.aux_scalar[name] = float(rest)
            except ValueError:
                raise ModelFormatError(f"line {line_no}: bad scalar value")
    return model
