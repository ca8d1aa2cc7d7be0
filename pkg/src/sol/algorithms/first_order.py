"""First-order online learners: Perceptron, OGD, PA family, ALMA, RDA."""

import math

import numpy as np
from numba import njit

from ..errors import ConfigError
from .base import Algorithm, GradientAlgorithm, margin_and_targets, predicted_label


class Perceptron(Algorithm):
    """Mistake-driven additive updates (Rosenblatt)."""

    name = "perceptron"
    defaults = {}
    losses = ("bool",)

    def _update(self, model, idx, vals, label, scores):
        pred = predicted_label(model, scores)
        if pred == label:
            return False
        if model.class_count == 2:
            y = 1.0 if label == 1 else -1.0
            model.weights[0][idx] += y * vals
        else:
            model.weights[label][idx] += vals
            model.weights[pred][idx] -= vals
        return True


@njit(cache=True, nogil=True)
def _ogd_hinge_binary_chunk(w, indptr, indices, values, labels,
                            t0, eta, power_t, bias):
    """Fused predict/update pass for binary hinge OGD over one chunk."""
    updates = 0
    mistakes = 0
    t = t0
    for i in range(labels.size):
        lo = indptr[i]
        hi = indptr[i + 1]
        s = 0.0
        for j in range(lo, hi):
            s += w[indices[j]] * values[j]
        if bias:
            s += w[0]
        label = labels[i]
        if (1 if s > 0.0 else 0) != label:
            mistakes += 1
        t += 1
        y = 1.0 if label == 1 else -1.0
        if 1.0 - y * s > 0.0 and (hi > lo or bias):
            eta_t = eta if power_t == 0.0 else eta / t ** power_t
            coef = eta_t * y
            for j in range(lo, hi):
                w[indices[j]] += coef * values[j]
            if bias:
                w[0] += coef
            updates += 1
    return updates, mistakes


class OGD(GradientAlgorithm):
    """Online gradient descent with eta_t = eta / t**power_t (Zinkevich).

    power_t = 0 gives a constant step; the default 0.5 is the usual
    1/sqrt(t) decay.
    """

    name = "ogd"
    defaults = {"eta": 1.0, "power_t": 0.5}

    def validate(self, hyper):
        if hyper["eta"] <= 0.0:
            raise ConfigError("ogd requires eta > 0")
        if hyper["power_t"] < 0.0:
            raise ConfigError("ogd requires power_t >= 0")

    def _update(self, model, idx, vals, label, scores):
        m, g, targets = self.gradient_scale(model, scores, label)
        if g == 0.0:
            return False
        t = model.t + 1
        eta_t = model.hyper["eta"] / t ** model.hyper["power_t"]
        for c, direction in targets:
            model.weights[c][idx] -= (eta_t * g * direction) * vals
        return True

    def process_chunk(self, model, chunk):
        if model.class_count != 2 or model.loss_kind != "hinge":
            return super().process_chunk(model, chunk)
        if model.bias and chunk.indices.size and not chunk.indices.all():
            raise ConfigError(
                "feature id 0 present in data but reserved for the bias term"
            )
        updates, mistakes = _ogd_hinge_binary_chunk(
            model.weights[0], chunk.indptr, chunk.indices, chunk.values,
            chunk.labels, model.t, model.hyper["eta"],
            model.hyper["power_t"], model.bias,
        )
        model.t += len(chunk)
        return len(chunk), updates, mistakes


class PassiveAggressive(GradientAlgorithm):
    """PA margin-projection updates (Crammer et al.), variants PA/PA-I/PA-II."""

    name = "pa"
    defaults = {}
    losses = ("hinge",)
    variant = 0

    def _update(self, model, idx, vals, label, scores):
        m, targets = margin_and_targets(model, scores, label)
        loss = 1.0 - m
        if loss <= 0.0:
            return False
        normsq = float(vals @ vals) * len(targets)
        if normsq == 0.0:
            return False
        if self.variant == 1:
            tau = min(model.hyper["C"], loss / normsq)
        elif self.variant == 2:
            tau = loss / (normsq + 0.5 / model.hyper["C"])
        else:
            tau = loss / normsq
        for c, direction in targets:
            model.weights[c][idx] += (tau * direction) * vals
        return True


class PA1(PassiveAggressive):
    name = "pa1"
    defaults = {"C": 1.0}
    variant = 1

    def validate(self, hyper):
        if hyper["C"] <= 0.0:
            raise ConfigError(f"{self.name} requires C > 0")


class PA2(PA1):
    name = "pa2"
    variant = 2


class ALMA(Algorithm):
    """Approximate large margin algorithm, p = 2 form (Gentile).

    Keeps the weight vector inside the unit L2 ball. The stored vector is
    scaled by aux scalar `scale` so that ball projections cost O(1); the
    squared norm of the stored vector is tracked incrementally.
    """

    name = "alma"
    defaults = {"alpha": 1.0, "eta": math.sqrt(2.0)}
    losses = ("hinge",)
    aux_scalars = {"k": 1.0, "scale": 1.0, "sqnorm": 0.0}
    save_scalars = ("k", "sqnorm")

    def validate(self, hyper):
        if not 0.0 < hyper["alpha"] <= 1.0:
            raise ConfigError("alma requires alpha in (0, 1]")
        if hyper["eta"] <= 0.0:
            raise ConfigError("alma requires eta > 0")

    def effective_values(self, model, c, idx):
        return model.aux_scalar["scale"] * model.weights[c][idx]

    def _update(self, model, idx, vals, label, scores):
        m, targets = margin_and_targets(model, scores, label)
        alpha = model.hyper["alpha"]
        k = model.aux_scalar["k"]
        gamma_k = (1.0 / alpha) * math.sqrt(1.0 / k)
        if m > (1.0 - alpha) * gamma_k:
            return False
        eta_k = model.hyper["eta"] / math.sqrt(k)
        scale = model.aux_scalar["scale"]
        sqnorm = model.aux_scalar["sqnorm"]
        for c, direction in targets:
            v = model.weights[c]
            old = v[idx].copy()
            new = old + (eta_k * direction / scale) * vals
            v[idx] = new
            sqnorm += float(new @ new) - float(old @ old)
        sqnorm = max(sqnorm, 0.0)
        w_norm = scale * math.sqrt(sqnorm)
        if w_norm > 1.0:
            scale /= w_norm
        model.aux_scalar["sqnorm"] = sqnorm
        model.aux_scalar["scale"] = scale
        model.aux_scalar["k"] = k + 1.0
        if scale < 1e-100:
            self.flush(model)
        return True

    def flush(self, model):
        scale = model.aux_scalar["scale"]
        if scale != 1.0:
            for v in model.weights:
                v *= scale
            model.aux_scalar["sqnorm"] *= scale * scale
            model.aux_scalar["scale"] = 1.0


class RDA(GradientAlgorithm):
    """Plain dual averaging: weights follow the running gradient average
    scaled by sqrt(n)/gamma (Xiao), recomputed lazily from the raw sum.
    """

    name = "rda"
    defaults = {"gamma": 1.0}
    aux_vectors = {"gsum": 0.0}
    aux_scalars = {"n": 0.0}
    save_vectors = ("gsum",)
    save_scalars = ("n",)

    def validate(self, hyper):
        if hyper["gamma"] <= 0.0:
            raise ConfigError(f"{self.name} requires gamma > 0")

    def _weight_coef(self, model, n):
        return -math.sqrt(n) / model.hyper["gamma"]

    def effective_values(self, model, c, idx):
        n = model.aux_scalar["n"]
        if n == 0.0:
            return np.zeros(idx.size)
        gbar = model.aux_vec["gsum"][c][idx] / n
        return self._weight_coef(model, n) * gbar

    def _update(self, model, idx, vals, label, scores):
        m, g, targets = self.gradient_scale(model, scores, label)
        if g == 0.0:
            return False
        for c, direction in targets:
            model.aux_vec["gsum"][c][idx] += (g * direction) * vals
        model.aux_scalar["n"] += 1.0
        return True

    def flush(self, model):
        n = model.aux_scalar["n"]
        for c in range(model.n_vectors):
            if n == 0.0:
                model.weights[c][:] = 0.0
            else:
                gbar = model.aux_vec["gsum"][c] / n
                model.weights[c][:] = self._weight_coef(model, n) * gbar
