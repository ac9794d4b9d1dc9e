import numpy as np
import pytest

from epsbench.machine import EpsilonMachine

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    """Collect one pass/fail line per acceptance criterion for the summary."""
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:>2} {name:<28} {status}  {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def golden_mean():
    """No-11 process: state A emits 0/1 evenly, 1 leads to B which must emit 0."""
    return EpsilonMachine.from_transitions(
        2, 2, [(0, 0, 0.5, 0), (0, 1, 0.5, 1), (1, 0, 1.0, 0)]
    )


@pytest.fixture
def period_two():
    return EpsilonMachine.from_transitions(2, 2, [(0, 1, 1.0, 1), (1, 0, 1.0, 0)])


@pytest.fixture
def fair_coin():
    return EpsilonMachine.from_transitions(1, 2, [(0, 0, 0.5, 0), (0, 1, 0.5, 0)])


@pytest.fixture
def biased_coin():
    return EpsilonMachine.from_transitions(1, 2, [(0, 0, 0.1, 0), (0, 1, 0.9, 0)])


def brute_force_words(machine: EpsilonMachine, pi, length: int) -> dict[str, float]:
    """Independent word-probability oracle: explicit path recursion in Python."""
    out = {}

    def walk(word, state_probs):
        if len(word) == length:
            out[word] = sum(state_probs.values())
            return
        for x in range(machine.alphabet_size):
            child = {}
            for s, p in state_probs.items():
                em = machine.emission[s, x]
                if em > 0 and p > 0:
                    dest = int(machine.next_state[s, x])
                    child[dest] = child.get(dest, 0.0) + p * em
            walk(word + str(x), child)

    walk("", {s: float(pi[s]) for s in range(machine.n_states)})
    return out


def brute_force_block_entropy(machine: EpsilonMachine, pi, length: int) -> float:
    words = brute_force_words(machine, pi, length)
    return -sum(p * np.log(p) for p in words.values() if p > 0)
