"""Trained-predictor wrapper: one interface over the four families.

Families and their readout widths at the matched comparison point:

  ngrc          last-m shift register, quadratic features  (m=10 -> 65)
  rc_quadratic  reservoir state, quadratic features        (10 nodes -> 65)
  rc_linear     reservoir state, linear features           (110 nodes -> 110)
  lstm          hidden state of a gated recurrent cell     (110 units -> 110)

Every predictor exposes predict_proba(symbols)[t] = P(x_t = 1 | x_{<t}), and
error rates count argmax misses with ties resolved toward symbol 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from ..errors import EmptyRange, ParseError
from ..rng import derive_seed
from .logistic import LogisticReadout, train_logistic_readout
from .lstm import LstmConfig, LstmModel, train_lstm
from .ngrc import NgrcConfig, feature_count, ngrc_feature_matrix
from .reservoir import (
    DEFAULT_WASHOUT,
    ReservoirConfig,
    ReservoirParams,
    init_reservoir,
    run_reservoir,
)

RC_LINEAR = "rc_linear"
RC_QUADRATIC = "rc_quadratic"
NGRC = "ngrc"
LSTM = "lstm"
FAMILIES = (NGRC, RC_QUADRATIC, RC_LINEAR, LSTM)

DEFAULT_L2 = 1e-4


def _quadratic_expand(states: np.ndarray) -> np.ndarray:
    n = states.shape[1]
    pairs = list(combinations_with_replacement(range(n), 2))
    iu = np.array([i for i, _ in pairs])
    ju = np.array([j for _, j in pairs])
    return np.concatenate([states, states[:, iu] * states[:, ju]], axis=1)


@dataclass(eq=False)
class TrainedPredictor:
    family: str
    config: object
    feature_count: int
    readout: LogisticReadout | None = None
    reservoir: ReservoirParams | None = None
    lstm: LstmModel | None = None
    washout: int = DEFAULT_WASHOUT

    def min_time(self) -> int:
        """Earliest position with a well-defined prediction."""
        if self.family == NGRC:
            return self.config.m
        return 0

    def predict_proba(self, symbols) -> np.ndarray:
        """P(x_t = 1 | x_{<t}) for every t; NaN before min_time()."""
        symbols = np.asarray(symbols)
        n = symbols.shape[0]
        if self.family == NGRC:
            m = self.config.m
            out = np.full(n, np.nan)
            if n > m:
                feats, t0 = ngrc_feature_matrix(symbols, m)
                # row k describes the window ending at t0+k and predicts t0+k+1
                out[t0 + 1 :] = self.readout.predict_proba(feats[:-1])
            return out
        if self.family in (RC_LINEAR, RC_QUADRATIC):
            states, _ = run_reservoir(self.reservoir, symbols, washout=0)
            feats = states[:n]  # state before consuming symbols[t]
            if self.family == RC_QUADRATIC:
                feats = _quadratic_expand(feats)
            return self.readout.predict_proba(feats)
        if self.family == LSTM:
            return self.lstm.predict_proba(symbols)
        raise ValueError(f"unknown family {self.family!r}")


def train_predictor(
    family: str,
    symbols,
    config,
    l2_lambda: float = DEFAULT_L2,
    washout: int = DEFAULT_WASHOUT,
) -> TrainedPredictor:
    """Train one family on a symbol series."""
    symbols = np.asarray(symbols)
    if family == LSTM:
        model = train_lstm(config, symbols)
        return TrainedPredictor(
            family=family,
            config=config,
            feature_count=config.hidden_size,
            lstm=model,
            washout=washout,
        )
    if family == NGRC:
        m = config.m
        feats, t0 = ngrc_feature_matrix(symbols, m)
        start = max(washout, t0 + 1)
        X = feats[start - 1 - t0 : -1]
        y = symbols[start:]
        readout = train_logistic_readout(X, y, l2_lambda)
        return TrainedPredictor(
            family=family,
            config=config,
            feature_count=feature_count(m),
            readout=readout,
            washout=washout,
        )
    if family in (RC_LINEAR, RC_QUADRATIC):
        params = init_reservoir(config)
        states, cut = run_reservoir(params, symbols, washout)
        X = states[cut:-1]
        y = symbols[cut:]
        if family == RC_QUADRATIC:
            X = _quadratic_expand(X)
        readout = train_logistic_readout(X, y, l2_lambda)
        n_feats = config.n_nodes
        if family == RC_QUADRATIC:
            n_feats += (config.n_nodes * (config.n_nodes + 1)) // 2
        return TrainedPredictor(
            family=family,
            config=config,
            feature_count=n_feats,
            readout=readout,
            reservoir=params,
            washout=washout,
        )
    raise ValueError(f"unknown family {family!r}")


def evaluate_error_rate(predictor: TrainedPredictor, symbols, eval_range) -> float:
    """Fraction of positions in [start, stop) where the argmax guess misses.

    Ties (predicted probability exactly 0.5) go to symbol 0. The range must
    be disjoint from whatever the predictor was trained on; that is the
    caller's contract.
    """
    symbols = np.asarray(symbols)
    start, stop = eval_range
    stop = min(stop, symbols.shape[0])
    if stop <= start:
        raise EmptyRange(f"evaluation range [{start}, {stop}) selects nothing")
    if start < predictor.min_time():
        raise ValueError(
            f"range starts at {start}, before the first defined prediction "
            f"({predictor.min_time()})"
        )
    p = predictor.predict_proba(symbols)[start:stop]
    guess = (p > 0.5).astype(np.int8)
    return float(np.mean(guess != symbols[start:stop]))


def matched_configs(
    m: int = 10,
    seed: int = 0,
    rc_linear_nodes: int = 110,
    lstm_hidden: int = 110,
    lstm_overrides: dict | None = None,
) -> dict[str, object]:
    """The four matched-readout configurations.

    The shift-register predictor with m timesteps has m + m(m+1)/2 quadratic
    readout inputs; a reservoir with m nodes and quadratic readout matches it
    exactly, and the linear-readout reservoir and the LSTM match each other
    at rc_linear_nodes = lstm_hidden readout inputs.
    """
    lstm_kwargs = {
        "hidden_size": lstm_hidden,
        "seed": derive_seed(seed, "lstm"),
    }
    if lstm_overrides:
        lstm_kwargs.update(lstm_overrides)
    return {
        NGRC: NgrcConfig(m=m, seed=derive_seed(seed, "ngrc")),
        RC_QUADRATIC: ReservoirConfig(n_nodes=m, seed=derive_seed(seed, "rc_quadratic")),
        RC_LINEAR: ReservoirConfig(n_nodes=rc_linear_nodes, seed=derive_seed(seed, "rc_linear")),
        LSTM: LstmConfig(**lstm_kwargs),
    }


# --- predictor dump ----------------------------------------------------------
#
# Structured text, one "key value..." line per scalar/array row; arrays print
# every entry with 17 significant digits. Enough to reload and re-evaluate.


def _fmt(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in np.atleast_1d(values))


def dump_predictor(tp: TrainedPredictor) -> str:
    lines = [f"family {tp.family}", f"feature_count {tp.feature_count}", f"washout {tp.washout}"]
    cfg = tp.config
    if tp.family == NGRC:
        lines.append(f"config m {cfg.m} seed {cfg.seed}")
    elif tp.family in (RC_LINEAR, RC_QUADRATIC):
        lines.append(
            f"config n_nodes {cfg.n_nodes} nonlinear_fraction {cfg.nonlinear_fraction:.17g} "
            f"spectral_radius {cfg.spectral_radius:.17g} input_scale {cfg.input_scale:.17g} "
            f"seed {cfg.seed}"
        )
    else:
        lines.append(
            f"config hidden_size {cfg.hidden_size} bptt_window {cfg.bptt_window} "
            f"learning_rate {cfg.learning_rate:.17g} max_epochs {cfg.max_epochs} "
            f"seed {cfg.seed} batch_size {cfg.batch_size} clip_norm {cfg.clip_norm:.17g} "
            f"patience {cfg.patience} val_fraction {cfg.val_fraction:.17g}"
        )
    if tp.readout is not None:
        lines.append(f"readout_bias {tp.readout.bias:.17g}")
        lines.append(f"readout_l2 {tp.readout.l2_lambda:.17g}")
        lines.append(f"readout_weights {_fmt(tp.readout.weights)}")
    if tp.reservoir is not None:
        res = tp.reservoir
        lines.append(f"reservoir_sizes {res.n_nonlinear} {res.n_linear}")
        for name, arr in (
            ("w_nonlinear", res.w_nonlinear),
            ("w_linear", res.w_linear),
        ):
            for row in np.atleast_2d(arr) if arr.size else []:
                lines.append(f"{name}_row {_fmt(row)}")
        lines.append(f"v_nonlinear {_fmt(res.v_nonlinear)}" if res.v_nonlinear.size else "v_nonlinear")
        lines.append(f"v_linear {_fmt(res.v_linear)}" if res.v_linear.size else "v_linear")
    if tp.lstm is not None:
        p = tp.lstm.params
        lines.append(f"lstm_w_in {_fmt(p['w_in'])}")
        for row in p["w_rec"]:
            lines.append(f"lstm_w_rec_row {_fmt(row)}")
        lines.append(f"lstm_bias {_fmt(p['bias'])}")
        lines.append(f"lstm_readout_w {_fmt(p['readout_w'])}")
        lines.append(f"lstm_readout_b {_fmt(p['readout_b'])}")
    return "\n".join(lines) + "\n"


def load_predictor(text: str) -> TrainedPredictor:
    fields: dict[str, list[list[str]]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        fields.setdefault(tokens[0], []).append(tokens[1:])
    try:
        family = fields["family"][0][0]
        n_feats = int(fields["feature_count"][0][0])
        washout = int(fields["washout"][0][0])
        cfg_tokens = fields["config"][0]
    except (KeyError, IndexError) as exc:
        raise ParseError(f"missing predictor header field: {exc}") from None
    cfg_map = dict(zip(cfg_tokens[::2], cfg_tokens[1::2]))

    def floats(key):
        return np.array([float(v) for v in fields[key][0]]) if fields.get(key) else np.zeros(0)

    readout = None
    if "readout_weights" in fields:
        readout = LogisticReadout(
            weights=floats("readout_weights"),
            bias=float(fields["readout_bias"][0][0]),
            l2_lambda=float(fields["readout_l2"][0][0]),
        )

    if family == NGRC:
        config = NgrcConfig(m=int(cfg_map["m"]), seed=int(cfg_map["seed"]))
        return TrainedPredictor(family, config, n_feats, readout=readout, washout=washout)
    if family in (RC_LINEAR, RC_QUADRATIC):
        config = ReservoirConfig(
            n_nodes=int(cfg_map["n_nodes"]),
            nonlinear_fraction=float(cfg_map["nonlinear_fraction"]),
            spectral_radius=float(cfg_map["spectral_radius"]),
            input_scale=float(cfg_map["input_scale"]),
            seed=int(cfg_map["seed"]),
        )
        n_nl, n_l = (int(v) for v in fields["reservoir_sizes"][0])
        w_nl = np.array([[float(v) for v in row] for row in fields.get("w_nonlinear_row", [])])
        w_l = np.array([[float(v) for v in row] for row in fields.get("w_linear_row", [])])
        res = ReservoirParams(
            config=config,
            w_nonlinear=w_nl.reshape(n_nl, n_nl),
            w_linear=w_l.reshape(n_l, n_l),
            v_nonlinear=floats("v_nonlinear"),
            v_linear=floats("v_linear"),
        )
        return TrainedPredictor(
            family, config, n_feats, readout=readout, reservoir=res, washout=washout
        )
    if family == LSTM:
        config = LstmConfig(
            hidden_size=int(cfg_map["hidden_size"]),
            bptt_window=int(cfg_map["bptt_window"]),
            learning_rate=float(cfg_map["learning_rate"]),
            max_epochs=int(cfg_map["max_epochs"]),
            seed=int(cfg_map["seed"]),
            batch_size=int(cfg_map["batch_size"]),
            clip_norm=float(cfg_map["clip_norm"]),
            patience=int(cfg_map["patience"]),
            val_fraction=float(cfg_map["val_fraction"]),
        )
        params = {
            "w_in": floats("lstm_w_in"),
            "w_rec": np.array([[float(v) for v in row] for row in fields["lstm_w_rec_row"]]),
            "bias": floats("lstm_bias"),
            "readout_w": floats("lstm_readout_w"),
            "readout_b": floats("lstm_readout_b"),
        }
        model = LstmModel(config=config, params=params)
        return TrainedPredictor(family, config, n_feats, lstm=model, washout=washout)
    raise ParseError(f"unknown family {family!r}")
