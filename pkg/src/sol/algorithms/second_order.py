"""Second-order learners with per-coordinate confidence state.

All methods keep diagonal covariance / accumulator vectors only; full
matrices do not scale to high-dimensional data. Closed-form confidence
projections (CW/ECCW) are validated against a numerical KKT root oracle
in the test suite.
"""

import math
from statistics import NormalDist

import numpy as np

from ..errors import ConfigError
from .base import (
    Algorithm,
    GradientAlgorithm,
    clip_to_capacity,
    margin_and_targets,
    predicted_label,
    soft_threshold,
)

# phi for the default confidence level 0.7
DEFAULT_PHI = NormalDist().inv_cdf(0.7)


class SOP(Algorithm):
    """Second-order perceptron, diagonal whitening variant (Cesa-Bianchi).

    The weight vectors hold the mistake-accumulated sums u; prediction
    whitens by a + S_i + x_i^2 where S accumulates squared features.
    """

    name = "sop"
    defaults = {"a": 1.0}
    losses = ("bool",)
    aux_vectors = {"S": 0.0}
    save_vectors = ("S",)

    def validate(self, hyper):
        if hyper["a"] <= 0.0:
            raise ConfigError("sop requires a > 0")

    def scores(self, model, idx, vals):
        idx, vals = clip_to_capacity(model, idx, vals)
        out = np.zeros(model.n_vectors)
        if idx.size:
            a = model.hyper["a"]
            xsq = vals * vals
            for c in range(model.n_vectors):
                denom = a + model.aux_vec["S"][c][idx] + xsq
                out[c] = float((model.weights[c][idx] / denom) @ vals)
        return out

    def _update(self, model, idx, vals, label, scores):
        pred = predicted_label(model, scores)
        if pred == label:
            return False
        xsq = vals * vals
        if model.class_count == 2:
            y = 1.0 if label == 1 else -1.0
            model.weights[0][idx] += y * vals
            model.aux_vec["S"][0][idx] += xsq
        else:
            model.weights[label][idx] += vals
            model.aux_vec["S"][label][idx] += xsq
            model.weights[pred][idx] -= vals
            model.aux_vec["S"][pred][idx] += xsq
        return True


def cw_step_size(m, v, phi):
    """Linearized CW projection step: smallest alpha >= 0 satisfying the
    variance-form margin constraint m' >= phi * v' with equality."""
    b = 1.0 + 2.0 * phi * m
    disc = b * b - 8.0 * phi * (m - phi * v)
    return max(0.0, (-b + math.sqrt(disc)) / (4.0 * phi * v))


def eccw_step_size(m, v, phi):
    """Exact convex CW step: alpha solving m' = phi * sqrt(v') (Crammer)."""
    psi = 1.0 + phi * phi / 2.0
    zeta = 1.0 + phi * phi
    disc = m * m * phi ** 4 / 4.0 + v * phi * phi * zeta
    return max(0.0, (-m * psi + math.sqrt(disc)) / (v * zeta))


class CW(Algorithm):
    """Confidence-weighted learning, linearized diagonal form (Dredze)."""

    name = "cw"
    defaults = {"phi": DEFAULT_PHI}
    losses = ("hinge",)
    aux_vectors = {"sigma": 1.0}
    save_vectors = ("sigma",)

    def validate(self, hyper):
        if hyper["phi"] <= 0.0:
            raise ConfigError(f"{self.name} requires phi > 0")

    def _confidence(self, model, idx, xsq, targets):
        return sum(
            float(model.aux_vec["sigma"][c][idx] @ xsq) for c, _ in targets
        )

    def _step_size(self, m, v, phi):
        return cw_step_size(m, v, phi)

    def _shrink_sigma(self, sigma, xsq, alpha, v, phi):
        # Sigma_ii^-1 += 2 alpha phi x_i^2
        return sigma / (1.0 + 2.0 * alpha * phi * xsq * sigma)

    def _update(self, model, idx, vals, label, scores):
        m, targets = margin_and_targets(model, scores, label)
        phi = model.hyper["phi"]
        xsq = vals * vals
        v = self._confidence(model, idx, xsq, targets)
        if v <= 0.0:
            return False
        alpha = self._step_size(m, v, phi)
        if alpha <= 0.0:
            return False
        for c, direction in targets:
            sigma = model.aux_vec["sigma"][c][idx]
            model.weights[c][idx] += (alpha * direction) * (sigma * vals)
            model.aux_vec["sigma"][c][idx] = self._shrink_sigma(
                sigma, xsq, alpha, v, phi
            )
        return True


class ECCW(CW):
    name = "eccw"

    def _step_size(self, m, v, phi):
        return eccw_step_size(m, v, phi)

    def _shrink_sigma(self, sigma, xsq, alpha, v, phi):
        # Sigma_ii^-1 += alpha phi / sqrt(u) x_i^2 with sqrt(u) the
        # post-update standard deviation.
        sqrt_u = 0.5 * (-alpha * v * phi
                        + math.sqrt(alpha * alpha * v * v * phi * phi + 4.0 * v))
        beta = alpha * phi / sqrt_u
        return sigma / (1.0 + beta * xsq * sigma)


class AROW(Algorithm):
    """Adaptive regularization of weight vectors, diagonal form (Crammer)."""

    name = "arow"
    defaults = {"r": 1.0}
    losses = ("hinge",)
    aux_vectors = {"sigma": 1.0}
    save_vectors = ("sigma",)

    def validate(self, hyper):
        if hyper["r"] <= 0.0:
            raise ConfigError("arow requires r > 0")

    def _update(self, model, idx, vals, label, scores):
        m, targets = margin_and_targets(model, scores, label)
        if 1.0 - m <= 0.0:
            return False
        xsq = vals * vals
        v = sum(float(model.aux_vec["sigma"][c][idx] @ xsq) for c, _ in targets)
        beta = 1.0 / (v + model.hyper["r"])
        alpha = (1.0 - m) * beta
        for c, direction in targets:
            sigma = model.aux_vec["sigma"][c][idx]
            model.weights[c][idx] += (alpha * direction) * (sigma * vals)
            model.aux_vec["sigma"][c][idx] = sigma - beta * sigma * sigma * xsq
        return True


class AdaFOBOS(GradientAlgorithm):
    """Adaptive-gradient FOBOS (Duchi et al.): per-coordinate step
    eta / (delta + sqrt(G_i)), optional L1 shrink applied lazily.

    Untouched coordinates owe one soft-threshold of eta*lambda/H_i per
    active step; H_i is constant while a coordinate is untouched, so the
    pending amount collapses to a single threshold.
    """

    name = "ada-fobos"
    defaults = {"eta": 1.0, "delta": 1.0}
    aux_vectors = {"G": 0.0, "mark": 0.0}
    aux_scalars = {"n": 0.0}
    save_vectors = ("G",)

    def validate(self, hyper):
        if hyper["eta"] <= 0.0 or hyper["delta"] <= 0.0:
            raise ConfigError(f"{self.name} requires eta > 0 and delta > 0")
        if hyper.get("lambda", 0.0) < 0.0:
            raise ConfigError(f"{self.name} requires lambda >= 0")

    def _lambda(self, model):
        return model.hyper.get("lambda", 0.0)

    def _pending(self, model, c, idx, upto_n):
        lam = self._lambda(model)
        eta = model.hyper["eta"]
        H = model.hyper["delta"] + np.sqrt(model.aux_vec["G"][c][idx])
        missed = upto_n - model.aux_vec["mark"][c][idx]
        return missed * eta * lam / H

    def effective_values(self, model, c, idx):
        w = model.weights[c][idx]
        if self._lambda(model) == 0.0:
            return w
        return soft_threshold(w, self._pending(model, c, idx,
                                                model.aux_scalar["n"]))

    def _update(self, model, idx, vals, label, scores):
        m, g, targets = self.gradient_scale(model, scores, label)
        if g == 0.0:
            return False
        eta = model.hyper["eta"]
        delta = model.hyper["delta"]
        lam = self._lambda(model)
        n = model.aux_scalar["n"] + 1.0
        for c, direction in targets:
            gvec = (g * direction) * vals
            if lam > 0.0:
                w_cur = soft_threshold(
                    model.weights[c][idx],
                    self._pending(model, c, idx, n - 1.0),
                )
            else:
                w_cur = model.weights[c][idx]
            G = model.aux_vec["G"][c][idx] + gvec * gvec
            model.aux_vec["G"][c][idx] = G
            H = delta + np.sqrt(G)
            w_new = w_cur - eta * gvec / H
            if lam > 0.0:
                w_new = soft_threshold(w_new, eta * lam / H)
                model.aux_vec["mark"][c][idx] = n
            model.weights[c][idx] = w_new
        model.aux_scalar["n"] = n
        return True

    def flush(self, model):
        if self._lambda(model) == 0.0:
            model.aux_scalar["n"] = 0.0
            return
        n = model.aux_scalar["n"]
        eta = model.hyper["eta"]
        lam = self._lambda(model)
        delta = model.hyper["delta"]
        for c in range(model.n_vectors):
            H = delta + np.sqrt(model.aux_vec["G"][c])
            missed = n - model.aux_vec["mark"][c]
            model.weights[c][:] = soft_threshold(
                model.weights[c], missed * eta * lam / H
            )
            model.aux_vec["mark"][c][:] = 0.0
        model.aux_scalar["n"] = 0.0


class AdaFOBOSL1(AdaFOBOS):
    name = "ada-fobos-l1"
    defaults = {"eta": 1.0, "delta": 1.0, "lambda": 0.0}


class AdaRDA(GradientAlgorithm):
    """Adaptive-gradient dual averaging (Duchi et al.).

    Weights are a closed form of the gradient sum, the squared-gradient
    accumulator, and the active-step count, so no timestamps are needed.
    """

    name = "ada-rda"
    defaults = {"eta": 1.0, "delta": 1.0}
    aux_vectors = {"G": 0.0, "gsum": 0.0}
    aux_scalars = {"n": 0.0}
    save_vectors = ("G", "gsum")
    save_scalars = ("n",)

    validate = AdaFOBOS.validate
    _lambda = AdaFOBOS._lambda

    def effective_values(self, model, c, idx):
        n = model.aux_scalar["n"]
        if n == 0.0:
            return np.zeros(idx.size)
        gsum = model.aux_vec["gsum"][c][idx]
        H = model.hyper["delta"] + np.sqrt(model.aux_vec["G"][c][idx])
        gbar = gsum / n
        mag = np.maximum(np.abs(gbar) - self._lambda(model), 0.0)
        return -np.sign(gbar) * (model.hyper["eta"] * n / H) * mag

    def _update(self, model, idx, vals, label, scores):
        m, g, targets = self.gradient_scale(model, scores, label)
        if g == 0.0:
            return False
        for c, direction in targets:
            gvec = (g * direction) * vals
            model.aux_vec["gsum"][c][idx] += gvec
            model.aux_vec["G"][c][idx] += gvec * gvec
        model.aux_scalar["n"] += 1.0
        return True

    def flush(self, model):
        n = model.aux_scalar["n"]
        for c in range(model.n_vectors):
            if n == 0.0:
                model.weights[c][:] = 0.0
                continue
            gbar = model.aux_vec["gsum"][c] / n
            H = model.hyper["delta"] + np.sqrt(model.aux_vec["G"][c])
            mag = np.maximum(np.abs(gbar) - self._lambda(model), 0.0)
            model.weights[c][:] = (-np.sign(gbar)
                                   * (model.hyper["eta"] * n / H) * mag)


class AdaRDAL1(AdaRDA):
    name = "ada-rda-l1"
    defaults = {"eta": 1.0, "delta": 1.0, "lambda": 0.0}
