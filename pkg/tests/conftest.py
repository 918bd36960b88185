import numpy as np
import pytest
from hypothesis import strategies as st

from eprsim.qcore import PureState, UnitAxis


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def _unit(v):
    v = np.asarray(v, dtype=float)
    return UnitAxis.from_vector(v)


finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)

axes = (
    st.tuples(finite, finite, finite)
    .filter(lambda v: np.linalg.norm(v) > 1e-3)
    .map(_unit)
)


def _state(parts):
    v = np.array(parts[0::2]) + 1j * np.array(parts[1::2])
    return PureState.normalized(v)


def states(n_qubits: int):
    size = 2 ** (n_qubits + 1)
    return st.lists(finite, min_size=size, max_size=size).filter(
        lambda p: np.linalg.norm(p) > 1e-3
    ).map(_state)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
