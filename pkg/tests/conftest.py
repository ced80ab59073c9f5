import numpy as np
import pytest

from neutral_periodic.periodic import PeriodicTrajectory

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict = {}


def smooth_trajectory(rng, spec, harmonics=3, decay=3.0, scale=1.0):
    """Random periodic trajectory with a few time harmonics and |c_n| ~ n^-decay."""
    n = np.arange(1, spec.n_modes + 1)
    nu = 2 * np.pi / spec.omega
    t = spec.times[:, None]
    out = np.zeros((spec.m_t, spec.n_modes))
    for k in range(harmonics):
        out += (rng.standard_normal(spec.n_modes) * np.cos(k * nu * t)
                + rng.standard_normal(spec.n_modes) * np.sin(k * nu * t)) * n**-decay
    return PeriodicTrajectory(spec.omega, scale * out)


@pytest.fixture
def smooth():
    return smooth_trajectory


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
