"""A from-scratch LSTM next-symbol predictor.

Single standard cell (input/forget/output gates, tanh candidate, forget bias
started at +1) with a logistic readout on the hidden state, trained
end-to-end by truncated backpropagation through time over contiguous
windows, with Adam, global gradient clipping, and early stopping on a
held-back validation tail. Everything is float64 numpy, deterministic given
the config seed, and the analytic gradients are held to a central
finite-difference check in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergenceDetected
from ..rng import derive_seed, generator


@dataclass(frozen=True)
class LstmConfig:
    hidden_size: int
    bptt_window: int = 32
    learning_rate: float = 1e-3
    max_epochs: int = 40
    seed: int = 0
    batch_size: int = 128
    clip_norm: float = 1.0
    patience: int = 5
    val_fraction: float = 0.1

    def __post_init__(self):
        for name in ("hidden_size", "bptt_window", "learning_rate", "max_epochs", "batch_size"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def init_params(config: LstmConfig) -> dict[str, np.ndarray]:
    h = config.hidden_size
    k = 1.0 / np.sqrt(h)
    rng = generator(derive_seed(config.seed, "lstm-init"))
    params = {
        "w_in": rng.uniform(-k, k, size=4 * h),
        "w_rec": rng.uniform(-k, k, size=(h, 4 * h)),
        "bias": np.zeros(4 * h),
        "readout_w": rng.uniform(-k, k, size=h),
        "readout_b": np.zeros(1),
    }
    params["bias"][h : 2 * h] = 1.0  # open the forget gate early in training
    return params


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    neg = ~pos
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[neg])
    out[neg] = ez / (1.0 + ez)
    return out


def forward_backward(params, inputs, targets):
    """Mean cross-entropy over a (batch, time) window block, plus gradients.

    inputs[b, t] feeds the cell at step t; the readout after that step
    predicts targets[b, t]. States start at zero for every window.
    """
    h_size = params["w_rec"].shape[0]
    X = np.asarray(inputs, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    B, T = X.shape
    norm = B * T

    w_in, w_rec, bias = params["w_in"], params["w_rec"], params["bias"]
    a, a0 = params["readout_w"], params["readout_b"]

    h = np.zeros((B, h_size))
    c = np.zeros((B, h_size))
    cache = []
    loss = 0.0
    dlogits = np.empty((B, T))
    for t in range(T):
        x_t = X[:, t]
        z = x_t[:, None] * w_in + h @ w_rec + bias
        gi = _sigmoid(z[:, :h_size])
        gf = _sigmoid(z[:, h_size : 2 * h_size])
        gg = np.tanh(z[:, 2 * h_size : 3 * h_size])
        go = _sigmoid(z[:, 3 * h_size :])
        c_prev, h_prev = c, h
        c = gf * c_prev + gi * gg
        tc = np.tanh(c)
        h = go * tc
        logits = h @ a + a0[0]
        loss += float(np.sum(np.logaddexp(0.0, logits) - Y[:, t] * logits))
        dlogits[:, t] = (_sigmoid(logits) - Y[:, t]) / norm
        cache.append((x_t, h_prev, c_prev, gi, gf, gg, go, tc, h))
    loss /= norm

    grads = {k: np.zeros_like(v) for k, v in params.items()}
    dh_next = np.zeros((B, h_size))
    dc_next = np.zeros((B, h_size))
    for t in range(T - 1, -1, -1):
        x_t, h_prev, c_prev, gi, gf, gg, go, tc, h_t = cache[t]
        dl = dlogits[:, t]
        grads["readout_w"] += h_t.T @ dl
        grads["readout_b"][0] += dl.sum()
        dh = dl[:, None] * a + dh_next
        do = dh * tc
        dc = dc_next + dh * go * (1.0 - tc * tc)
        df = dc * c_prev
        di = dc * gg
        dg = dc * gi
        dc_next = dc * gf
        dz = np.concatenate(
            [
                di * gi * (1.0 - gi),
                df * gf * (1.0 - gf),
                dg * (1.0 - gg * gg),
                do * go * (1.0 - go),
            ],
            axis=1,
        )
        grads["w_in"] += x_t @ dz
        grads["w_rec"] += h_prev.T @ dz
        grads["bias"] += dz.sum(axis=0)
        dh_next = dz @ w_rec.T
    return loss, grads


def window_loss(params, inputs, targets) -> float:
    """Forward-only mean cross-entropy (validation scoring)."""
    h_size = params["w_rec"].shape[0]
    X = np.asarray(inputs, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    B, T = X.shape
    h = np.zeros((B, h_size))
    c = np.zeros((B, h_size))
    loss = 0.0
    for t in range(T):
        z = X[:, t][:, None] * params["w_in"] + h @ params["w_rec"] + params["bias"]
        gi = _sigmoid(z[:, :h_size])
        gf = _sigmoid(z[:, h_size : 2 * h_size])
        gg = np.tanh(z[:, 2 * h_size : 3 * h_size])
        go = _sigmoid(z[:, 3 * h_size :])
        c = gf * c + gi * gg
        h = go * np.tanh(c)
        logits = h @ params["readout_w"] + params["readout_b"][0]
        loss += float(np.sum(np.logaddexp(0.0, logits) - Y[:, t] * logits))
    return loss / (B * T)


@dataclass(eq=False)
class LstmModel:
    config: LstmConfig
    params: dict[str, np.ndarray]
    train_curve: tuple[float, ...] = ()
    val_curve: tuple[float, ...] = ()
    best_epoch: int = 0

    def predict_proba(self, symbols) -> np.ndarray:
        """p[t] = P(symbols[t] = 1 | symbols[:t]), run statefully from zero."""
        x = np.asarray(symbols, dtype=np.float64)
        h_size = self.config.hidden_size
        p = np.empty(x.shape[0])
        h = np.zeros(h_size)
        c = np.zeros(h_size)
        w_in, w_rec, bias = self.params["w_in"], self.params["w_rec"], self.params["bias"]
        a, a0 = self.params["readout_w"], self.params["readout_b"][0]
        for t in range(x.shape[0]):
            p[t] = _sigmoid(np.atleast_1d(h @ a + a0))[0]
            z = x[t] * w_in + h @ w_rec + bias
            gi = _sigmoid(z[:h_size])
            gf = _sigmoid(z[h_size : 2 * h_size])
            gg = np.tanh(z[2 * h_size : 3 * h_size])
            go = _sigmoid(z[3 * h_size :])
            c = gf * c + gi * gg
            h = go * np.tanh(c)
        return p


@dataclass
class _Adam:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def step(self, params, grads):
        self.t += 1
        for key, g in grads.items():
            if key not in self.m:
                self.m[key] = np.zeros_like(g)
                self.v[key] = np.zeros_like(g)
            self.m[key] = self.beta1 * self.m[key] + (1 - self.beta1) * g
            self.v[key] = self.beta2 * self.v[key] + (1 - self.beta2) * g * g
            m_hat = self.m[key] / (1 - self.beta1**self.t)
            v_hat = self.v[key] / (1 - self.beta2**self.t)
            params[key] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _clip(grads, max_norm: float) -> None:
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm:
        scale = max_norm / total
        for g in grads.values():
            g *= scale


def train_lstm(config: LstmConfig, symbols) -> LstmModel:
    """Truncated-BPTT training with early stopping on a validation tail.

    Windows are contiguous, non-overlapping blocks of bptt_window + 1 symbols
    (inputs then shifted targets); the last val_fraction of them are held
    back for the stopping criterion and never touched by gradients.
    """
    x = np.asarray(symbols, dtype=np.float64)
    w = config.bptt_window
    if x.shape[0] <= w:
        raise ValueError(f"series length {x.shape[0]} must exceed the window {w}")
    starts = np.arange(0, x.shape[0] - w, w)
    windows = np.stack([x[s : s + w + 1] for s in starts])
    n_val = max(1, int(round(config.val_fraction * windows.shape[0])))
    n_val = min(n_val, windows.shape[0] - 1)
    train_w, val_w = windows[:-n_val], windows[-n_val:]
    val_inputs, val_targets = val_w[:, :-1], val_w[:, 1:]

    params = init_params(config)
    opt = _Adam(lr=config.learning_rate)
    best = (np.inf, {k: v.copy() for k, v in params.items()}, 0)
    wait = 0
    train_curve: list[float] = []
    val_curve: list[float] = []

    for epoch in range(config.max_epochs):
        order = generator(derive_seed(config.seed, "lstm-shuffle", epoch)).permutation(
            train_w.shape[0]
        )
        epoch_loss = 0.0
        n_batches = 0
        for lo in range(0, order.shape[0], config.batch_size):
            batch = train_w[order[lo : lo + config.batch_size]]
            loss, grads = forward_backward(params, batch[:, :-1], batch[:, 1:])
            if not np.isfinite(loss):
                raise DivergenceDetected(f"training loss became {loss!r} at epoch {epoch}")
            _clip(grads, config.clip_norm)
            opt.step(params, grads)
            epoch_loss += loss
            n_batches += 1
        train_curve.append(epoch_loss / max(n_batches, 1))

        val_loss = window_loss(params, val_inputs, val_targets)
        if not np.isfinite(val_loss):
            raise DivergenceDetected(f"validation loss became {val_loss!r} at epoch {epoch}")
        val_curve.append(val_loss)
        if val_loss < best[0] - 1e-6:
            best = (val_loss, {k: v.copy() for k, v in params.items()}, epoch)
            wait = 0
        else:
            wait += 1
            if wait >= config.patience:
                break

    return LstmModel(
        config=config,
        params=best[1],
        train_curve=tuple(train_curve),
        val_curve=tuple(val_curve),
        best_epoch=best[2],
    )
