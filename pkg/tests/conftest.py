import numpy as np
import pytest

from photonlab.modes import build_kgrid

# acceptance criteria record one summary line each; collected here so the
# terminal summary shows the full scoreboard even when everything passes
ACCEPTANCE_LOG = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def grid1():
    return build_kgrid(1, 64, 8.0)


@pytest.fixture(scope="session")
def grid3():
    return build_kgrid(3, 16, 2.0 * np.pi)


def record_criterion(index: int, label: str, ok: bool, detail: str):
    ACCEPTANCE_LOG.append((index, label, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for index, label, ok, detail in sorted(ACCEPTANCE_LOG):
        tag = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{tag}] {index:2d}. {label}: {detail}")
