from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rodeo.pauli import PauliHamiltonian

settings.register_profile(
    "rodeo", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("rodeo")

coefficient = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
hamiltonians = st.builds(PauliHamiltonian, coefficient, coefficient, coefficient, coefficient)
times = st.floats(-20.0, 20.0, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw):
    re = draw(st.lists(st.floats(-1, 1), min_size=2, max_size=2))
    im = draw(st.lists(st.floats(-1, 1), min_size=2, max_size=2))
    v = np.array(re) + 1j * np.array(im)
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([1.0, 0.0], dtype=complex), 1.0
    return v / n


def random_hamiltonian(rng: np.random.Generator) -> PauliHamiltonian:
    return PauliHamiltonian(*rng.uniform(-1, 1, 4))


def random_state(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


KET0 = np.array([1.0, 0.0], dtype=complex)


@pytest.fixture
def ket0() -> np.ndarray:
    return KET0.copy()


def pytest_terminal_summary(terminalreporter):
    from runs import ACCEPTANCE, format_row

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for row in sorted(ACCEPTANCE):
            terminalreporter.write_line(format_row(row))
