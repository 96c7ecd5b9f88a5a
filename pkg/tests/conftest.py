import numpy as np
import pytest

from cohnet.scenario import ChannelMatrix, ChannelModel, ScenarioConfig, make_scenario

MODELS = list(ChannelModel)


def random_channels(rng, n, m, spread=0.5):
    """Unstructured channel: gains in [1 - spread, 1 + spread], uniform phases."""
    gains = rng.uniform(1 - spread, 1 + spread, (n, m))
    phases = rng.uniform(0, 2 * np.pi, (n, m))
    return ChannelMatrix(gains, phases)


def scenario_channels(seed, n, m, model=ChannelModel.INVERSE_SQUARE, D=1000.0, r=10.0, k=1):
    cfg = ScenarioConfig(n, m, k, D, r, channel_model=model)
    return make_scenario(cfg, np.random.default_rng(seed))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
