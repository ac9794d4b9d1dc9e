"""L2-regularized logistic regression, trained by damped Newton iteration.

This is the readout layer every non-LSTM predictor shares. The objective
(mean cross-entropy plus 0.5*lambda*||w||^2, bias unpenalized) is convex, so
Newton with an Armijo backtracking line search lands on the global optimum;
the line search also gives the monotone-descent guarantee the tests assert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteFeature

GRAD_TOL = 1e-6
MAX_ITER = 10_000
_ARMIJO_C = 1e-4
_MIN_STEP = 2.0**-30


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _objective(X, y, w, b, lam):
    z = X @ w + b
    # log(1 + e^z) - y z, stable on both tails
    ce = np.logaddexp(0.0, z) - y * z
    return float(ce.mean() + 0.5 * lam * (w @ w))


def _grad_norm(X, y, w, b, lam) -> float:
    p = _sigmoid(X @ w + b)
    resid = (p - y) / y.shape[0]
    grad_w = X.T @ resid + lam * w
    return max(np.abs(grad_w).max(initial=0.0), abs(float(resid.sum())))


@dataclass(eq=False)
class LogisticReadout:
    weights: np.ndarray
    bias: float
    l2_lambda: float
    converged: bool = True
    n_iter: int = 0
    objective_trace: tuple[float, ...] = ()

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(np.asarray(X) @ self.weights + self.bias)


def train_logistic_readout(
    features: np.ndarray,
    targets: np.ndarray,
    l2_lambda: float = 1e-4,
    tol: float = GRAD_TOL,
    max_iter: int = MAX_ITER,
) -> LogisticReadout:
    """Fit P(y=1|x) = sigmoid(w.x + b). Deterministic; converged when the
    gradient infinity-norm drops below ``tol``."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] < 1:
        raise ValueError("features must be (n_samples, n_features) matching targets")
    if not np.isfinite(X).all():
        raise NonFiniteFeature("non-finite value in feature matrix")
    if not np.isfinite(y).all():
        raise NonFiniteFeature("non-finite value in targets")

    n, f = X.shape
    w = np.zeros(f)
    b = 0.0
    lam = float(l2_lambda)
    trace = [_objective(X, y, w, b, lam)]
    n_steps = 0

    for _ in range(max_iter):
        p = _sigmoid(X @ w + b)
        resid = (p - y) / n
        grad_w = X.T @ resid + lam * w
        grad_b = float(resid.sum())
        if max(np.abs(grad_w).max(initial=0.0), abs(grad_b)) < tol:
            break

        s = p * (1.0 - p) / n
        Xa = np.hstack([X, np.ones((n, 1))])
        hess = (Xa * s[:, None]).T @ Xa
        hess[np.arange(f), np.arange(f)] += lam
        hess[np.arange(f + 1), np.arange(f + 1)] += 1e-12  # collinear features
        grad = np.append(grad_w, grad_b)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(hess, grad, rcond=None)

        # Backtrack until the Armijo decrease holds, keeping the objective
        # trace nonincreasing.
        t = 1.0
        base = trace[-1]
        slope = float(grad @ step)
        accepted = False
        while t >= _MIN_STEP:
            cand_w = w - t * step[:f]
            cand_b = b - t * step[f]
            cand = _objective(X, y, cand_w, cand_b, lam)
            if cand <= base - _ARMIJO_C * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break  # stalled at floating-point precision
        w, b = cand_w, float(cand_b)
        trace.append(cand)
        n_steps += 1

    converged = _grad_norm(X, y, w, b, lam) < tol
    return LogisticReadout(
        weights=w,
        bias=float(b),
        l2_lambda=lam,
        converged=converged,
        n_iter=n_steps,
        objective_trace=tuple(trace),
    )
