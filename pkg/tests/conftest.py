import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qubitsync import SystemParams  # noqa: E402


@pytest.fixture
def markov():
    return SystemParams(delta_detuning=1.0, epsilon_drive=1.0, gamma_coupling=0.1,
                        lambda_cutoff=5.0)


@pytest.fixture
def nonmarkov():
    return SystemParams(delta_detuning=1.0, epsilon_drive=1.0, gamma_coupling=0.1,
                        lambda_cutoff=0.01)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
