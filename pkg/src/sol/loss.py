"""Loss functions and their scalar (sub)gradients in the margin.

Binary margin is m = y * <w, x> with y in {+1, -1}; the multi-class
max-score margin is m = w_y.x - max_{r != y} w_r.x. Each loss returns
(loss, gscale) where gscale = d(loss)/d(margin), applied by learners as
gscale * y * x (binary) or with opposite signs on the true/violating
class pair (multi-class).
"""

import math

from .errors import ConfigError

HINGE = "hinge"
LOGISTIC = "logistic"
SQUARE = "square"
BOOL = "bool"

LOSS_KINDS = (HINGE, LOGISTIC, SQUARE, BOOL)


def loss_and_gradscale(kind, margin):
    """Evaluate a loss and its margin-derivative scalar."""
    if kind == HINGE:
        loss = 1.0 - margin
        if loss > 0.0:
            return loss, -1.0
        return 0.0, 0.0
    if kind == LOGISTIC:
        # numerically stable log(1 + exp(-m)) and -1/(1 + exp(m))
        if margin >= 0.0:
            e = math.exp(-margin)
            return math.log1p(e), -e / (1.0 + e)
        e = math.exp(margin)
        return -margin + math.log1p(e), -1.0 / (1.0 + e)
    if kind == SQUARE:
        d = 1.0 - margin
        return 0.5 * d * d, margin - 1.0
    if kind == BOOL:
        if margin <= 0.0:
            return 1.0, -1.0
        return 0.0, 0.0
    raise ConfigError(f"unknown loss kind {kind!r}")


def l1_regularized_loss(base_loss, weights, lam):
    """base + lambda * ||w||_1 over all class vectors (diagnostic value).

    Sparse learners apply the regularizer inside their updates; this
    scalar exists for reporting only.
    """
    if lam < 0.0:
        raise ConfigError("lambda must be >= 0")
    total = sum(float(abs(w).sum()) for w in weights)
    return base_loss + lam * total
