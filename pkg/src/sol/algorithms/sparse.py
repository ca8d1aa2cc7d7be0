"""Sparsity-inducing first-order learners: STG, FOBOS-L1, RDA-L1, ERDA-L1.

All regularization is applied lazily per coordinate so that update cost
stays proportional to the nonzeros of each example. Soft-threshold steps
compose (the thresholds add while a coordinate rests at the same side of
zero or at zero), so FOBOS needs only a cumulative-shrink counter; STG's
threshold operator is guarded by theta, so missed truncation events are
replayed per coordinate from a global event log (theta = inf collapses to
the prefix-sum fast path).
"""

import math

import numpy as np

from ..errors import ConfigError
from .base import GradientAlgorithm, soft_threshold
from .first_order import RDA


class FobosL1(GradientAlgorithm):
    """Forward-backward splitting with L1 (Duchi & Singer).

    Every active step owes every coordinate a soft-threshold of
    eta_t * lambda; `shrink_mark` records the cumulative threshold a
    coordinate has already absorbed.
    """

    name = "fobos-l1"
    defaults = {"eta": 1.0, "power_t": 0.5, "lambda": 0.0}
    aux_vectors = {"shrink_mark": 0.0}
    aux_scalars = {"cum_shrink": 0.0}

    def validate(self, hyper):
        if hyper["eta"] <= 0.0:
            raise ConfigError(f"{self.name} requires eta > 0")
        if hyper["power_t"] < 0.0:
            raise ConfigError(f"{self.name} requires power_t >= 0")
        if hyper["lambda"] < 0.0:
            raise ConfigError(f"{self.name} requires lambda >= 0")

    def effective_values(self, model, c, idx):
        w = model.weights[c][idx]
        if model.hyper["lambda"] == 0.0:
            return w
        pending = model.aux_scalar["cum_shrink"] - model.aux_vec["shrink_mark"][c][idx]
        return soft_threshold(w, pending)

    def _update(self, model, idx, vals, label, scores):
        m, g, targets = self.gradient_scale(model, scores, label)
        if g == 0.0:
            return False
        t = model.t + 1
        eta_t = model.hyper["eta"] / t ** model.hyper["power_t"]
        lam = model.hyper["lambda"]
        cum = model.aux_scalar["cum_shrink"]
        step_shrink = eta_t * lam
        for c, direction in targets:
            w_cur = self.effective_values(model, c, idx)
            w_new = w_cur - (eta_t * g * direction) * vals
            if lam > 0.0:
                w_new = soft_threshold(w_new, step_shrink)
                model.aux_vec["shrink_mark"][c][idx] = cum + step_shrink
            model.weights[c][idx] = w_new
        if lam > 0.0:
            model.aux_scalar["cum_shrink"] = cum + step_shrink
        return True

    def flush(self, model):
        cum = model.aux_scalar["cum_shrink"]
        if cum > 0.0:
            for c in range(model.n_vectors):
                pending = cum - model.aux_vec["shrink_mark"][c]
                model.weights[c][:] = soft_threshold(model.weights[c], pending)
                model.aux_vec["shrink_mark"][c][:] = 0.0
        model.aux_scalar["cum_shrink"] = 0.0


class STG(GradientAlgorithm):
    """Truncated gradient (Langford et al.): OGD steps plus a bounded
    shrink of at most eta_t * lambda * K every K-th active step, skipping
    coordinates with magnitude above theta.
    """

    name = "stg"
    defaults = {"eta": 1.0, "power_t": 0.5, "lambda": 0.0, "K": 10.0,
                "theta": math.inf}
    aux_vectors = {"applied": 0.0}
    aux_scalars = {"n": 0.0}
    save_scalars = ("n",)

    def validate(self, hyper):
        if hyper["eta"] <= 0.0:
            raise ConfigError("stg requires eta > 0")
        if hyper["power_t"] < 0.0:
            raise ConfigError("stg requires power_t >= 0")
        if hyper["lambda"] < 0.0:
            raise ConfigError("stg requires gravity lambda >= 0")
        if hyper["K"] < 1.0 or hyper["K"] != int(hyper["K"]):
            raise ConfigError("stg requires integer K >= 1")
        if hyper["theta"] <= 0.0:
            raise ConfigError("stg requires theta > 0")

    @staticmethod
    def _events(model):
        # (thresholds, prefix sums); prefix[j] = sum of the first j events
        return model.extra.setdefault("stg_events", ([], [0.0]))

    @staticmethod
    def _truncate(w, thr, theta):
        out = soft_threshold(w, thr)
        guard = np.abs(w) > theta
        out[guard] = w[guard]
        return out

    def effective_values(self, model, c, idx):
        w = np.array(model.weights[c][idx], copy=True)
        events, prefix = self._events(model)
        if not events:
            return w
        applied = model.aux_vec["applied"][c][idx]
        theta = model.hyper["theta"]
        if math.isinf(theta):
            pending = prefix[-1] - np.asarray(prefix)[applied.astype(np.int64)]
            return soft_threshold(w, pending)
        for j in range(idx.size):
            for e in range(int(applied[j]), len(events)):
                if abs(w[j]) <= theta:
                    w[j] = math.copysign(max(abs(w[j]) - events[e], 0.0), w[j])
        return w

    def _update(self, model, idx, vals, label, scores):
        m, g, targets = self.gradient_scale(model, scores, label)
        if g == 0.0:
            return False
        t = model.t + 1
        eta_t = model.hyper["eta"] / t ** model.hyper["power_t"]
        lam = model.hyper["lambda"]
        K = int(model.hyper["K"])
        theta = model.hyper["theta"]
        n = model.aux_scalar["n"] + 1.0
        events, prefix = self._events(model)
        truncate_now = lam > 0.0 and int(n) % K == 0
        for c, direction in targets:
            w_cur = self.effective_values(model, c, idx)
            w_new = w_cur - (eta_t * g * direction) * vals
            if truncate_now:
                w_new = self._truncate(w_new, eta_t * lam * K, theta)
            model.weights[c][idx] = w_new
            if events or truncate_now:
                model.aux_vec["applied"][c][idx] = len(events) + (
                    1 if truncate_now else 0
                )
        if truncate_now:
            events.append(eta_t * lam * K)
            prefix.append(prefix[-1] + eta_t * lam * K)
        model.aux_scalar["n"] = n
        return True

    def flush(self, model):
        events, prefix = self._events(model)
        if events:
            theta = model.hyper["theta"]
            for c in range(model.n_vectors):
                applied = model.aux_vec["applied"][c].astype(np.int64)
                w = model.weights[c]
                if math.isinf(theta):
                    pending = prefix[-1] - np.asarray(prefix)[applied]
                    w[:] = soft_threshold(w, pending)
                else:
                    for e, thr in enumerate(events):
                        todo = applied <= e
                        seg = w[todo]
                        w[todo] = self._truncate(seg, thr, theta)
                model.aux_vec["applied"][c][:] = 0.0
        model.extra.pop("stg_events", None)


class RdaL1(RDA):
    """L1-regularized dual averaging (Xiao): coordinates whose average
    gradient magnitude stays below the threshold are exactly zero.
    """

    name = "rda-l1"
    defaults = {"gamma": 1.0, "lambda": 0.0}
    enhanced = False

    def validate(self, hyper):
        super().validate(hyper)
        if hyper["lambda"] < 0.0:
            raise ConfigError(f"{self.name} requires lambda >= 0")
        if self.enhanced and hyper["rho"] < 0.0:
            raise ConfigError(f"{self.name} requires rho >= 0")

    def _threshold(self, model, n):
        lam = model.hyper["lambda"]
        if self.enhanced:
            lam += model.hyper["gamma"] * model.hyper["rho"] / math.sqrt(n)
        return lam

    def effective_values(self, model, c, idx):
        n = model.aux_scalar["n"]
        if n == 0.0:
            return np.zeros(idx.size)
        gbar = model.aux_vec["gsum"][c][idx] / n
        mag = np.maximum(np.abs(gbar) - self._threshold(model, n), 0.0)
        return -np.sign(gbar) * (math.sqrt(n) / model.hyper["gamma"]) * mag

    def flush(self, model):
        n = model.aux_scalar["n"]
        for c in range(model.n_vectors):
            if n == 0.0:
                model.weights[c][:] = 0.0
                continue
            gbar = model.aux_vec["gsum"][c] / n
            mag = np.maximum(np.abs(gbar) - self._threshold(model, n), 0.0)
            model.weights[c][:] = (-np.sign(gbar)
                                   * (math.sqrt(n) / model.hyper["gamma"]) * mag)


class ErdaL1(RdaL1):
    """RDA-L1 with the enhanced, slowly decaying extra threshold."""

    name = "erda-l1"
    defaults = {"gamma": 1.0, "lambda": 0.0, "rho": 0.005}
    enhanced = True
