import pytest
from hypothesis import strategies as st

from microdyn.core import make_particle

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line[1])


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def _report(number, passed, text):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append((number, f"[{number:>2}] {status}  {text}"))
        return passed

    return _report


@pytest.fixture
def unit_state():
    return make_particle(1.0, 1.0, 1.0, 1.0, 0.0)


positive = st.floats(min_value=0.05, max_value=20.0, allow_nan=False, allow_infinity=False)
amplitude = st.floats(min_value=0.0, max_value=10.0, allow_nan=False, allow_infinity=False)
angle = st.floats(min_value=0.0, max_value=6.283, allow_nan=False, allow_infinity=False)


@st.composite
def particle_states(draw):
    return make_particle(draw(positive), draw(positive), draw(positive), draw(amplitude),
                         draw(angle))
