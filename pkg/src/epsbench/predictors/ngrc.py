"""Shift-register predictor features: the last m symbols and their pairwise
products.

The state is s_t = (x_t, x_{t-1}, ..., x_{t-m+1}); the readout sees s_t plus
the upper triangle (diagonal included) of s_t s_t^T, i.e. m + m(m+1)/2
features. For binary inputs the diagonal products duplicate the linear terms;
they are kept, and readout regularization absorbs the collinearity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np


@dataclass(frozen=True)
class NgrcConfig:
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")


def feature_count(m: int, include_quadratic: bool = True) -> int:
    return m + (m * (m + 1)) // 2 if include_quadratic else m


def _product_indices(m: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(combinations_with_replacement(range(m), 2))
    iu = np.array([i for i, _ in pairs], dtype=np.int64)
    ju = np.array([j for _, j in pairs], dtype=np.int64)
    return iu, ju


def ngrc_features(symbols, m: int, t: int, include_quadratic: bool = True) -> np.ndarray:
    """Feature vector at time t (window x_t .. x_{t-m+1}, newest first)."""
    if t < m - 1:
        raise IndexError(f"t must be >= m-1 = {m - 1}, got {t}")
    x = np.asarray(symbols, dtype=np.float64)
    lags = x[t - m + 1 : t + 1][::-1]
    if not include_quadratic:
        return lags.copy()
    iu, ju = _product_indices(m)
    return np.concatenate([lags, lags[iu] * lags[ju]])


def ngrc_feature_matrix(
    symbols, m: int, include_quadratic: bool = True
) -> tuple[np.ndarray, int]:
    """Features for every admissible time at once.

    Returns (F, t0) where row k of F is ngrc_features(symbols, m, t0 + k)
    and t0 = m - 1 is the first time with a full window.
    """
    x = np.asarray(symbols, dtype=np.float64)
    if x.shape[0] < m:
        raise IndexError(f"series of length {x.shape[0]} has no m={m} window")
    lags = np.lib.stride_tricks.sliding_window_view(x, m)[:, ::-1]
    if not include_quadratic:
        return np.ascontiguousarray(lags), m - 1
    iu, ju = _product_indices(m)
    feats = np.concatenate([lags, lags[:, iu] * lags[:, ju]], axis=1)
    return np.ascontiguousarray(feats), m - 1
