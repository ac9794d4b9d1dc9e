"""Exact word statistics and prediction-error bounds for binary processes.

Everything here is computed by explicit enumeration of length-L words under
the generating machine, carrying the joint (word, state) probability vector
down the word tree. Block entropies give the finite-history conditional
entropy curve h(m) = H(m+1) - H(m); inverting the binary entropy function
turns any such conditional entropy into a lower bound on next-symbol
prediction error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapExceeded, DomainError, UnsupportedAlphabet
from .machine import EpsilonMachine, entropy_rate, stationary_distribution

LN2 = math.log(2.0)
DEFAULT_LENGTH_CAP = 20
GENERAL_ALPHABET_MAX_LENGTH = 10
PRUNE_MASS = 1e-300
_INVERSE_TOL = 1e-10
_INVERSE_MAX_ITER = 200


def _check_enumeration_args(machine: EpsilonMachine, length: int, cap: int) -> None:
    if length < 0:
        raise ValueError("length must be nonnegative")
    if length > cap:
        raise CapExceeded(f"length {length} exceeds enumeration cap {cap}")
    if machine.alphabet_size > 2 and length > GENERAL_ALPHABET_MAX_LENGTH:
        raise UnsupportedAlphabet(
            f"alphabet size {machine.alphabet_size} enumerations stop at length "
            f"{GENERAL_ALPHABET_MAX_LENGTH}"
        )


def word_distribution(
    machine: EpsilonMachine,
    length: int,
    cap: int = DEFAULT_LENGTH_CAP,
    pi: np.ndarray | None = None,
) -> dict[str, float]:
    """Exact stationary probability of every length-``length`` word.

    p(w) = sum_s pi(s) * product of emission probabilities along the unique
    path w induces from s. Keys are symbol strings like "010"; all |A|^length
    words appear, including probability-zero ones.
    """
    _check_enumeration_args(machine, length, cap)
    if pi is None:
        pi = stationary_distribution(machine)
    a = machine.alphabet_size
    out: dict[str, float] = {}

    def walk(vec: np.ndarray, prefix: str) -> None:
        if len(prefix) == length:
            out[prefix] = float(vec.sum())
            return
        for x in range(a):
            weights = vec * machine.emission[:, x]
            dest = machine.next_state[:, x]
            ok = dest >= 0
            child = np.bincount(dest[ok], weights=weights[ok], minlength=machine.n_states)
            walk(child, prefix + str(x))

    walk(pi, "")
    return out


def block_entropy_curve(
    machine: EpsilonMachine,
    l_max: int,
    cap: int = DEFAULT_LENGTH_CAP,
    pi: np.ndarray | None = None,
) -> np.ndarray:
    """H(0..l_max) in nats; H(0) = 0 by convention."""
    _check_enumeration_args(machine, l_max, cap)
    if pi is None:
        pi = stationary_distribution(machine)
    return _kernels.block_entropies(
        machine.emission, machine.next_state, pi, l_max, PRUNE_MASS
    )


def block_entropy(machine: EpsilonMachine, length: int, cap: int = DEFAULT_LENGTH_CAP) -> float:
    return float(block_entropy_curve(machine, length, cap)[length])


@dataclass(frozen=True, eq=False)
class MyopicCurve:
    """h_of_m[m] = H[next symbol | last m symbols], m = 0..m_max, in nats."""

    h_of_m: np.ndarray
    h_mu: float

    @property
    def m_max(self) -> int:
        return self.h_of_m.shape[0] - 1


def myopic_entropy_rate(
    machine: EpsilonMachine,
    m_max: int,
    cap: int = DEFAULT_LENGTH_CAP,
    pi: np.ndarray | None = None,
) -> MyopicCurve:
    """Finite-history conditional entropy curve via block-entropy differences."""
    if m_max + 1 > cap:
        raise CapExceeded(f"m_max {m_max} needs words of length {m_max + 1} > cap {cap}")
    if pi is None:
        pi = stationary_distribution(machine)
    h_blocks = block_entropy_curve(machine, m_max + 1, cap, pi=pi)
    return MyopicCurve(h_of_m=np.diff(h_blocks), h_mu=entropy_rate(machine, pi))


def predictive_information(curve: MyopicCurve, m: int) -> float:
    """Cumulative excess of finite-history entropy over the asymptotic rate."""
    if not 0 <= m <= curve.m_max:
        raise IndexError(f"m must be in 0..{curve.m_max}, got {m}")
    return float(np.sum(curve.h_of_m[: m + 1] - curve.h_mu))


def binary_entropy(p: float) -> float:
    """-p ln p - (1-p) ln(1-p), with 0 ln 0 = 0. Nats."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log(p) - (1.0 - p) * math.log1p(-p))


def inverse_binary_entropy(h: float) -> float:
    """The p in [0, 1/2] with binary_entropy(p) = h, by bisection.

    Values within 1e-12 above ln 2 clamp to 0.5; anything else outside
    [0, ln 2] is a domain error.
    """
    if h < 0.0 or h > LN2 + 1e-12:
        raise DomainError(f"entropy {h!r} outside [0, ln 2]")
    if h >= LN2:
        return 0.5
    if h == 0.0:
        return 0.0
    lo, hi = 0.0, 0.5
    for _ in range(_INVERSE_MAX_ITER):
        mid = 0.5 * (lo + hi)
        val = binary_entropy(mid)
        if abs(val - h) < _INVERSE_TOL and hi - lo < 1e-12:
            return mid
        if val < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FanoBound:
    conditional_entropy: float
    pe_lower_bound: float
    pct_increase_over_pe_min: float


def fano_report(conditional_entropy: float, pe_min: float) -> FanoBound:
    """Error-probability lower bound implied by a conditional entropy.

    The percentage increase over pe_min is floored at 0; pe_min = 0 yields an
    infinite-percentage sentinel when the bound is positive.
    """
    pe_bound = inverse_binary_entropy(conditional_entropy)
    if pe_min == 0.0:
        pct = math.inf if pe_bound > 0.0 else 0.0
    else:
        pct = max(0.0, (pe_bound - pe_min) / pe_min * 100.0)
    return FanoBound(conditional_entropy, pe_bound, pct)


@dataclass(frozen=True, eq=False)
class FanoCurve:
    """Per-m error bounds for one process: bounds[m] uses h_of_m[m]."""

    curve: MyopicCurve
    pe_min: float
    bounds: tuple[FanoBound, ...]


def fano_curve(curve: MyopicCurve, pe_min: float) -> FanoCurve:
    bounds = tuple(
        fano_report(min(float(h), LN2), pe_min) for h in curve.h_of_m
    )
    return FanoCurve(curve=curve, pe_min=pe_min, bounds=bounds)


def log_predictive_info_curve(h_mu: float = 0.5, m_max: int = 10_000) -> MyopicCurve:
    """Closed-form curve for a process whose predictive information grows
    logarithmically: the history-m gap decays like 1/(m-1), capped at ln 2.

    h(0) and h(1) sit at the binary maximum; h(m) = min(ln 2, h_mu + 1/(m-1))
    for m >= 2.
    """
    if not 0.0 <= h_mu <= LN2:
        raise DomainError(f"h_mu {h_mu!r} outside [0, ln 2]")
    h = np.empty(m_max + 1)
    h[: min(2, m_max + 1)] = LN2
    if m_max >= 2:
        m = np.arange(2, m_max + 1, dtype=np.float64)
        h[2:] = np.minimum(LN2, h_mu + 1.0 / (m - 1.0))
    return MyopicCurve(h_of_m=h, h_mu=h_mu)
