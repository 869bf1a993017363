import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from circindep import PairedCircSample

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

angles = st.floats(min_value=-np.pi, max_value=np.pi, exclude_max=True, allow_nan=False)
shifts = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False)


@st.composite
def paired_samples(draw, min_n=2, max_n=30):
    """Random paired samples, drawn through a seeded generator so shrinking
    stays cheap."""
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return PairedCircSample(rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sample(rng, n, dependent=False):
    t1 = rng.vonmises(0.3, 1.5, n)
    t2 = rng.vonmises(-1.0, 0.8, n)
    if dependent:
        t2 = t2 + 0.8 * t1
    return PairedCircSample(t1, t2)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
