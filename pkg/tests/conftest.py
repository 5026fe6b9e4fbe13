import numpy as np
import pytest

from eeval.synth import SynthConfig, generate, toy_dataset

TABLE1 = np.array(
    [
        [-0.7985, -0.9163, -2.3026, -2.9957],
        [-1.6094, -1.6094, -0.9163, -1.6094],
        [-1.2040, -0.9676, -1.3471, -2.8134],
    ]
)
TABLE2 = np.array(
    [
        [0.450, 0.400, 0.100, 0.050],
        [0.200, 0.200, 0.400, 0.200],
        [0.300, 0.380, 0.260, 0.060],
    ]
)
FOOTNOTE_PAIR = ([0.65, 0.34, -1.03], [-0.06, -0.11, 0.60])


@pytest.fixture(scope="session")
def synth7():
    return generate(SynthConfig(seed=7))


@pytest.fixture(scope="session")
def synth7_distorted():
    return generate(SynthConfig(seed=7, distortion_temperature=2.5))


@pytest.fixture(scope="session")
def small_synth():
    return generate(SynthConfig(seed=3, samples=(200, 400, 500)))


@pytest.fixture
def toy():
    return toy_dataset()


def pytest_terminal_summary(terminalreporter):
    try:
        from .test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: int(k.split()[0][2:])):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")
