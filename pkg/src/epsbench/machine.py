"""Finite unifilar hidden Markov chains and their exact analysis.

A machine is a set of states, a per-state emission distribution over symbols,
and a deterministic labeled transition map: from state s, emitting symbol x
leads to exactly one successor. That determinism is what makes every
analysis in this package closed-form: the stationary state distribution gives
the entropy rate and the minimal attainable next-symbol error probability
directly, with no latent-state filtering.

Probabilities are float64 throughout and all entropies are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from ._graph import strongly_connected_components
from .errors import ConvergenceError, NotIrreducible, ParseError

NORMALIZATION_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-10
DENSE_SOLVE_MAX_STATES = 512
POWER_TOL = 1e-13
POWER_MAX_SWEEPS = 10**6


@dataclass(frozen=True, eq=False)
class EpsilonMachine:
    """A unifilar labeled chain.

    emission[s, x] is p(x|s); next_state[s, x] is the successor, or -1 exactly
    where p(x|s) == 0. Arrays are frozen after construction so machines can be
    shared freely across workers.
    """

    emission: np.ndarray
    next_state: np.ndarray

    def __post_init__(self):
        em = np.ascontiguousarray(np.asarray(self.emission, dtype=np.float64))
        ns = np.ascontiguousarray(np.asarray(self.next_state, dtype=np.int32))
        if em.ndim != 2 or ns.shape != em.shape:
            raise ValueError("emission and next_state must be matching 2-D arrays")
        em.flags.writeable = False
        ns.flags.writeable = False
        object.__setattr__(self, "emission", em)
        object.__setattr__(self, "next_state", ns)

    @property
    def n_states(self) -> int:
        return self.emission.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.emission.shape[1]

    @classmethod
    def from_transitions(
        cls,
        n_states: int,
        alphabet_size: int,
        rows: Iterable[tuple[int, int, float, int]],
    ) -> "EpsilonMachine":
        """Build from (state, symbol, probability, next_state) records."""
        emission = np.zeros((n_states, alphabet_size))
        next_state = np.full((n_states, alphabet_size), -1, dtype=np.int32)
        for state, symbol, prob, dest in rows:
            emission[state, symbol] = prob
            next_state[state, symbol] = dest
        return cls(emission, next_state)

    def structurally_equal(self, other: "EpsilonMachine") -> bool:
        return (
            self.emission.shape == other.emission.shape
            and np.array_equal(self.emission, other.emission)
            and np.array_equal(self.next_state, other.next_state)
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _successors(machine: EpsilonMachine) -> list[list[int]]:
    adj: list[list[int]] = []
    for s in range(machine.n_states):
        adj.append([int(d) for d in machine.next_state[s] if d >= 0])
    return adj


def validate(machine: EpsilonMachine) -> ValidationReport:
    """Check every structural invariant; failures are reported, never raised."""
    em, ns = machine.emission, machine.next_state
    n = machine.n_states
    checks = []

    in_range = bool(np.all((em >= 0.0) & (em <= 1.0)))
    checks.append(
        CheckResult("probabilities_in_range", in_range, "" if in_range else "p(x|s) outside [0,1]")
    )

    sums = em.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > NORMALIZATION_TOL)
    checks.append(
        CheckResult(
            "emission_normalized",
            bad.size == 0,
            "" if bad.size == 0 else f"states {bad[:5].tolist()} sum to {sums[bad[:5]].tolist()}",
        )
    )

    targets_ok = bool(np.all((ns == -1) | ((ns >= 0) & (ns < n))))
    checks.append(
        CheckResult("targets_in_range", targets_ok, "" if targets_ok else "next_state outside 0..n-1")
    )

    support_ok = bool(np.all((em > 0.0) == (ns >= 0)))
    checks.append(
        CheckResult(
            "support_consistent",
            support_ok,
            "" if support_ok else "next_state defined iff p(x|s) > 0 violated",
        )
    )

    # The array representation admits at most one destination per (state,
    # symbol) by construction, so unifilarity reduces to the support check.
    checks.append(CheckResult("unifilar", True))

    if targets_ok and n > 0:
        comps = strongly_connected_components(_successors(machine))
        irreducible = len(comps) == 1 and len(comps[0]) == n
        detail = "" if irreducible else f"{len(comps)} strongly connected components"
        checks.append(CheckResult("irreducible", irreducible, detail))
    else:
        checks.append(CheckResult("irreducible", False, "skipped: invalid targets"))

    return ValidationReport(tuple(checks))


def _require_valid(machine: EpsilonMachine) -> None:
    report = validate(machine)
    if report.ok:
        return
    names = [c.name for c in report.failed()]
    if names == ["irreducible"]:
        raise NotIrreducible(report["irreducible"].detail or "machine is not irreducible")
    raise ValueError(f"machine failed validation: {', '.join(names)}")


def transition_matrix(machine: EpsilonMachine) -> np.ndarray:
    """Dense state-to-state matrix T[s, s'] = sum_x p(x|s) [next(s,x) = s']."""
    n = machine.n_states
    T = np.zeros((n, n))
    for x in range(machine.alphabet_size):
        dest = machine.next_state[:, x]
        ok = dest >= 0
        np.add.at(T, (np.flatnonzero(ok), dest[ok]), machine.emission[ok, x])
    return T


def stationary_distribution(machine: EpsilonMachine) -> np.ndarray:
    """Left fixed point of the state-to-state map, residual below 1e-10.

    Dense least-squares solve up to 512 states; above that, half-lazy power
    iteration (pi <- (pi + pi T)/2), which converges for periodic chains too
    and has the same fixed point. Residuals are always measured on T itself.
    """
    _require_valid(machine)
    n = machine.n_states
    if n == 1:
        return np.ones(1)

    if n <= DENSE_SOLVE_MAX_STATES:
        T = transition_matrix(machine)
        a = np.vstack([T.T - np.eye(n), np.ones((1, n))])
        b = np.zeros(n + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(a, b, rcond=None)
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
    else:
        pi = np.full(n, 1.0 / n)
        sweeps_done = 0
        chunk = 64
        while True:
            pi = _kernels.power_sweeps(machine.emission, machine.next_state, pi, chunk, True)
            sweeps_done += chunk
            residual = np.max(np.abs(_kernels.apply_transition(machine.emission, machine.next_state, pi) - pi))
            if residual < POWER_TOL:
                break
            if sweeps_done >= POWER_MAX_SWEEPS:
                if residual < STATIONARY_RESIDUAL_TOL:
                    break
                raise ConvergenceError(
                    f"power iteration residual {residual:.3e} after {sweeps_done} sweeps"
                )

    residual = np.max(np.abs(_kernels.apply_transition(machine.emission, machine.next_state, pi) - pi))
    if residual >= STATIONARY_RESIDUAL_TOL:
        raise ConvergenceError(f"stationary residual {residual:.3e} exceeds tolerance")
    return pi


def entropy_rate(machine: EpsilonMachine, pi: np.ndarray | None = None) -> float:
    """Per-symbol entropy in nats: -sum_s pi(s) sum_x p(x|s) ln p(x|s)."""
    if pi is None:
        pi = stationary_distribution(machine)
    em = machine.emission
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(em > 0.0, em * np.log(em), 0.0)
    return float(-(pi @ plogp.sum(axis=1)))


def min_error_probability(machine: EpsilonMachine, pi: np.ndarray | None = None) -> float:
    """Error rate of the synchronized argmax predictor: sum_s pi(s)(1 - max_x p(x|s))."""
    if pi is None:
        pi = stationary_distribution(machine)
    return float(pi @ (1.0 - machine.emission.max(axis=1)))


@dataclass(frozen=True, eq=False)
class MachineSummary:
    pi: np.ndarray
    h_mu: float
    pe_min: float


def analyze(machine: EpsilonMachine) -> MachineSummary:
    pi = stationary_distribution(machine)
    return MachineSummary(pi, entropy_rate(machine, pi), min_error_probability(machine, pi))


# --- text format -----------------------------------------------------------
#
# A machine file is UTF-8 text: two header lines and one line per supported
# transition, probabilities printed with 17 significant digits so a round
# trip is bit-exact.
#
#   n_states 2
#   alphabet_size 2
#   transition 0 0 0.5 0
#   transition 0 1 0.5 1
#   transition 1 0 1 0
#
# '#' starts a comment; blank lines are ignored.


def serialize(machine: EpsilonMachine) -> str:
    report = validate(machine)
    if not report.ok:
        names = ", ".join(c.name for c in report.failed())
        raise ValueError(f"refusing to serialize an invalid machine ({names})")
    lines = [f"n_states {machine.n_states}", f"alphabet_size {machine.alphabet_size}"]
    for s in range(machine.n_states):
        for x in range(machine.alphabet_size):
            p = machine.emission[s, x]
            if p > 0.0:
                lines.append(f"transition {s} {x} {p:.17g} {machine.next_state[s, x]}")
    return "\n".join(lines) + "\n"


def _parse_int(token: str, line_no: int, field: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected integer, got {token!r}", line=line_no, field=field) from None


def deserialize(text: str) -> EpsilonMachine:
    n_states = None
    alphabet_size = None
    rows: list[tuple[int, int, float, int]] = []
    seen: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        if key == "n_states":
            if len(tokens) != 2:
                raise ParseError("n_states takes one value", line=line_no, field="n_states")
            n_states = _parse_int(tokens[1], line_no, "n_states")
        elif key == "alphabet_size":
            if len(tokens) != 2:
                raise ParseError("alphabet_size takes one value", line=line_no, field="alphabet_size")
            alphabet_size = _parse_int(tokens[1], line_no, "alphabet_size")
        elif key == "transition":
            if len(tokens) != 5:
                raise ParseError(
                    "transition takes state symbol probability next_state",
                    line=line_no,
                    field="transition",
                )
            if n_states is None or alphabet_size is None:
                raise ParseError("transition before header", line=line_no, field="transition")
            s = _parse_int(tokens[1], line_no, "state")
            x = _parse_int(tokens[2], line_no, "symbol")
            try:
                p = float(tokens[3])
            except ValueError:
                raise ParseError(
                    f"expected probability, got {tokens[3]!r}", line=line_no, field="probability"
                ) from None
            dest = _parse_int(tokens[4], line_no, "next_state")
            if not 0 <= s < n_states:
                raise ParseError(f"state {s} out of range", line=line_no, field="state")
            if not 0 <= x < alphabet_size:
                raise ParseError(f"symbol {x} out of range", line=line_no, field="symbol")
            if not 0 <= dest < n_states:
                raise ParseError(f"next_state {dest} out of range", line=line_no, field="next_state")
            if not 0.0 < p <= 1.0:
                raise ParseError(
                    f"probability {p!r} outside (0, 1]", line=line_no, field="probability"
                )
            if (s, x) in seen:
                raise ParseError(
                    f"duplicate transition for state {s}, symbol {x}", line=line_no, field="transition"
                )
            seen.add((s, x))
            rows.append((s, x, p, dest))
        else:
            raise ParseError(f"unknown directive {key!r}", line=line_no, field=key)

    if n_states is None:
        raise ParseError("missing n_states header", field="n_states")
    if alphabet_size is None:
        raise ParseError("missing alphabet_size header", field="alphabet_size")

    machine = EpsilonMachine.from_transitions(n_states, alphabet_size, rows)
    sums = machine.emission.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-9)
    if bad.size:
        raise ParseError(
            f"state {int(bad[0])} emissions sum to {sums[bad[0]]!r}, expected 1",
            field="transition",
        )
    return machine


def write_machine(machine: EpsilonMachine, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(machine))


def read_machine(path) -> EpsilonMachine:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize(fh.read())
