"""Predictor families and their shared training/evaluation interface."""

from .logistic import LogisticReadout, train_logistic_readout  # noqa: F401
from .lstm import LstmConfig, LstmModel, train_lstm  # noqa: F401
from .model import (  # noqa: F401
    FAMILIES,
    LSTM,
    NGRC,
    RC_LINEAR,
    RC_QUADRATIC,
    TrainedPredictor,
    dump_predictor,
    evaluate_error_rate,
    load_predictor,
    matched_configs,
    train_predictor,
)
from .ngrc import NgrcConfig, feature_count, ngrc_feature_matrix, ngrc_features  # noqa: F401
from .reservoir import ReservoirConfig, init_reservoir, run_reservoir  # noqa: F401
