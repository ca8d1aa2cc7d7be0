"""Shared machinery for online learner implementations.

Every algorithm consumes one example per `update` call, increments the
model step counter exactly once, and leaves weights and auxiliary state
untouched when its trigger condition fails. Multi-class problems use the
single-competitor max-score reduction: the margin is the true class score
minus the top violating class score, and whatever coefficient the binary
rule produces is applied with opposite signs to that class pair.
"""

import numpy as np

from ..errors import ConfigError
from ..loss import loss_and_gradscale
from ..types import KNOWN_PARAMS


def soft_threshold(w, thr):
    """Shrink-toward-zero operator producing exact zeros."""
    return np.sign(w) * np.maximum(np.abs(w) - thr, 0.0)


def clip_to_capacity(model, idx, vals):
    """Drop coordinates beyond the model's allocated dimension.

    Out-of-range indices read as zero for prediction; training paths
    pre-grow the model so this is a no-op there.
    """
    if idx.size and idx[-1] >= model.capacity:
        keep = idx < model.capacity
        return idx[keep], vals[keep]
    return idx, vals


def predicted_label(model, scores):
    """Deterministic argmax with lowest-class-id tie-break."""
    if model.class_count == 2:
        return 1 if scores[0] > 0.0 else 0
    return int(np.argmax(scores))


def margin_and_targets(model, scores, label):
    """Margin plus the (class, direction) pair the update applies to.

    Binary models keep one weight vector; the direction is y in {+1,-1}.
    Multi-class models update the true class (+1) and the top violating
    class (-1, lowest id on ties).
    """
    if model.class_count == 2:
        y = 1.0 if label == 1 else -1.0
        return y * float(scores[0]), ((0, y),)
    s = np.array(scores, copy=True)
    sy = float(s[label])
    s[label] = -np.inf
    r = int(np.argmax(s))
    return sy - float(s[r]), ((label, 1.0), (r, -1.0))


class Algorithm:
    """Base class; subclasses implement `_update` and may override scoring."""

    name = ""
    defaults: dict = {}
    losses = ("hinge",)
    aux_vectors: dict = {}   # name -> growth fill value
    aux_scalars: dict = {}   # name -> initial value
    save_vectors: tuple = () # aux vectors persisted by save_model
    save_scalars: tuple = ()

    def validate(self, hyper):
        """Hyperparameter sanity checks; raises ConfigError."""

    def resolve_params(self, user):
        params = dict(self.defaults)
        for key, value in (user or {}).items():
            if key not in self.defaults:
                if key in KNOWN_PARAMS:
                    raise ConfigError(
                        f"parameter {key!r} is not accepted by algorithm "
                        f"{self.name!r} (accepts: {sorted(self.defaults) or '-'})"
                    )
                raise ConfigError(f"unknown parameter name {key!r}")
            params[key] = float(value)
        self.validate(params)
        return params

    # -- scoring ---------------------------------------------------------

    def effective_values(self, model, c, idx):
        """Current weight values at idx, with pending lazy updates applied.

        Must not mutate state; the update path re-derives and commits the
        same values.
        """
        return model.weights[c][idx]

    def scores(self, model, idx, vals):
        idx, vals = clip_to_capacity(model, idx, vals)
        out = np.zeros(model.n_vectors)
        if idx.size:
            for c in range(model.n_vectors):
                out[c] = float(self.effective_values(model, c, idx) @ vals)
        return out

    # -- updating --------------------------------------------------------

    def update(self, model, idx, vals, label, scores=None):
        """Consume one (augmented) example; returns True if state changed."""
        if scores is None:
            scores = self.scores(model, idx, vals)
        acted = False
        if idx.size:
            acted = self._update(model, idx, vals, label, scores)
        model.t += 1
        return acted

    def _update(self, model, idx, vals, label, scores):
        raise NotImplementedError

    def flush(self, model):
        """Materialize pending lazy state into model.weights (idempotent)."""

    # -- driver hook -----------------------------------------------------

    def process_chunk(self, model, chunk):
        """Default per-example loop; returns (examples, updates, mistakes)."""
        updates = 0
        mistakes = 0
        n = len(chunk)
        for i in range(n):
            idx, vals, label = chunk.row(i)
            idx, vals = model.augment(idx, vals)
            s = self.scores(model, idx, vals)
            if predicted_label(model, s) != label:
                mistakes += 1
            if idx.size and self._update(model, idx, vals, label, s):
                updates += 1
            model.t += 1
        return n, updates, mistakes


class GradientAlgorithm(Algorithm):
    """Base for learners driven by a loss (sub)gradient scalar."""

    losses = ("hinge", "logistic", "square")

    def gradient_scale(self, model, scores, label):
        """(margin, gscale, targets); gscale == 0 means a passive step."""
        m, targets = margin_and_targets(model, scores, label)
        _, g = loss_and_gradscale(model.loss_kind, m)
        return m, g, targets
