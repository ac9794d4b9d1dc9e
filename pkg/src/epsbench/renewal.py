"""Renewal processes as count-state machines.

A binary renewal process emits an event (symbol 1) after an i.i.d. number of
quiet steps (symbol 0). Given a survival function w(n) = P(interevent count
>= n), the machine has states counting the steps since the last event: state
n fires with the hazard rate F(n)/w(n) and resets to 0, otherwise counts up.
Truncation at n_max forces an event in the last state, keeping the machine
finite and irreducible; the tail of the interevent distribution is thereby
collapsed onto n_max, and every derived quantity depends on that choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpec
from .infotheory import (
    LN2,
    FanoCurve,
    fano_curve,
    inverse_binary_entropy,
    myopic_entropy_rate,
)
from .machine import EpsilonMachine, analyze

POWER_LAW = "power_law"
FROM_PQ = "from_pq"
EXPLICIT = "explicit"
DEFAULT_N_MAX = 10_000


@dataclass(frozen=True)
class SurvivalSpec:
    """Survival function family plus truncation count.

    w(0) is always 1; w must be nonincreasing and positive through n_max.
    """

    family: str
    n_max: int
    beta: float | None = None
    p: float | None = None
    q: float | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.family == POWER_LAW:
            if self.beta is None or not self.beta > 0:
                raise ValueError("power-law survival needs beta > 0")
        elif self.family == FROM_PQ:
            if self.p is None or self.q is None:
                raise ValueError("from_pq survival needs p and q")
            if not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
                raise ValueError("p and q must lie in (0, 1)")
        elif self.family == EXPLICIT:
            if self.table is None or len(self.table) < self.n_max + 1:
                raise ValueError("explicit survival table must cover 0..n_max")
            w = self.table
            if abs(w[0] - 1.0) > 1e-12:
                raise ValueError("w(0) must equal 1")
            for n in range(self.n_max):
                if w[n + 1] > w[n] + 1e-12:
                    raise ValueError(f"survival increases at n={n + 1}")
            if any(w[n] <= 0.0 for n in range(self.n_max + 1)):
                raise ValueError("survival must stay positive through n_max")
        else:
            raise ValueError(f"unknown survival family {self.family!r}")
        if self.family in (POWER_LAW, FROM_PQ) and not self.survival(self.n_max) > 0.0:
            raise ValueError(
                f"survival underflows to zero before n_max={self.n_max}; "
                "choose a smaller truncation"
            )

    @classmethod
    def power_law(cls, beta: float, n_max: int = DEFAULT_N_MAX) -> "SurvivalSpec":
        return cls(family=POWER_LAW, n_max=n_max, beta=beta)

    @classmethod
    def from_pq(cls, p: float, q: float, n_max: int = DEFAULT_N_MAX) -> "SurvivalSpec":
        return cls(family=FROM_PQ, n_max=n_max, p=p, q=q)

    @classmethod
    def explicit(cls, table, n_max: int | None = None) -> "SurvivalSpec":
        table = tuple(float(v) for v in table)
        if n_max is None:
            n_max = len(table) - 1
        return cls(family=EXPLICIT, n_max=n_max, table=table)

    def survival(self, n: int) -> float:
        """w(n) = P(interevent count >= n)."""
        if n < 0:
            raise IndexError("n must be nonnegative")
        if self.family == POWER_LAW:
            return 1.0 if n == 0 else float(n) ** -self.beta
        if self.family == FROM_PQ:
            p, q = self.p, self.q
            if n == 0:
                return 1.0
            if p == q:
                return n * p ** (n - 1) * (1.0 - p) + p**n
            return ((1.0 - q) * p**n - (1.0 - p) * q**n) / (p - q)
        if n >= len(self.table):
            return 0.0
        return self.table[n]


def interevent_pmf(spec: SurvivalSpec, n: int) -> float:
    """F(n): probability the interevent count equals n.

    Closed form for the two-parameter family; survival difference otherwise.
    Not truncation-adjusted: the machine builder absorbs the tail deficit at
    n_max by force-resetting there.
    """
    if not 0 <= n <= spec.n_max:
        raise IndexError(f"n must be in 0..{spec.n_max}, got {n}")
    if spec.family == FROM_PQ:
        p, q = spec.p, spec.q
        if p == q:
            return (1.0 - p) ** 2 * n * p ** (n - 1) if n >= 1 else 0.0
        return (1.0 - p) * (1.0 - q) * (p**n - q**n) / (p - q)
    return spec.survival(n) - spec.survival(n + 1)


def hazard_rate(spec: SurvivalSpec, n: int) -> float:
    """Event probability after n quiet steps; forced to 1 at the truncation."""
    if not 0 <= n <= spec.n_max:
        raise IndexError(f"n must be in 0..{spec.n_max}, got {n}")
    if n == spec.n_max:
        return 1.0
    return interevent_pmf(spec, n) / spec.survival(n)


def build_renewal_machine(spec: SurvivalSpec) -> EpsilonMachine:
    """Count-state machine: state n fires (symbol 1) with hazard F(n)/w(n)
    and resets to 0, otherwise (symbol 0) advances to n+1; state n_max always
    fires."""
    n_states = spec.n_max + 1
    emission = np.zeros((n_states, 2))
    next_state = np.full((n_states, 2), -1, dtype=np.int32)
    for n in range(n_states):
        h = hazard_rate(spec, n)
        if not -1e-12 <= h <= 1.0 + 1e-12:
            raise DegenerateSpec(f"hazard {h!r} at n={n} outside [0, 1]")
        h = min(max(h, 0.0), 1.0)
        emission[n, 1] = h
        emission[n, 0] = 1.0 - h
        if h > 0.0:
            next_state[n, 1] = 0
        if h < 1.0:
            next_state[n, 0] = n + 1
    return EpsilonMachine(emission, next_state)


def stationary_from_survival(spec: SurvivalSpec) -> np.ndarray:
    """Closed form for the built machine's stationary law: pi(n) ∝ w(n).

    Test oracle only; analysis paths go through the generic solver.
    """
    w = np.array([spec.survival(n) for n in range(spec.n_max + 1)])
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class RenewalCurve:
    """Bound curve for one renewal spec.

    The percentage reference is the infinite-memory error floor implied by
    inverting the binary entropy at h_mu (``sync_floor``) rather than the
    truncated machine's own minimal error: forced-reset truncation makes the
    marginal-predictor bound essentially equal to that minimal error, which
    would floor the whole curve to 0%. ``machine_pe_min`` is still reported.
    """

    spec: SurvivalSpec
    h_mu: float
    machine_pe_min: float
    sync_floor: float
    fano: FanoCurve


def renewal_fano_curve(spec: SurvivalSpec, m_max: int, cap: int = 20) -> RenewalCurve:
    """Full pipeline: build the machine, get exact ground truths, emit the
    per-m error-bound curve."""
    mach = build_renewal_machine(spec)
    summary = analyze(mach)
    curve = myopic_entropy_rate(mach, m_max, cap, pi=summary.pi)
    floor = inverse_binary_entropy(min(summary.h_mu, LN2))
    return RenewalCurve(
        spec=spec,
        h_mu=summary.h_mu,
        machine_pe_min=summary.pe_min,
        sync_floor=floor,
        fano=fano_curve(curve, floor),
    )
