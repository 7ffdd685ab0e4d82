import numpy as np
import pytest
from hypothesis import settings, strategies as st

from kkcollapse.quat import UnitQuaternion

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_coord = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def unit_quaternions(draw):
    v = np.array([draw(_coord) for _ in range(4)])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([1.0, 0.0, 0.0, 0.0]), 1.0
    return UnitQuaternion.from_array(v / n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
