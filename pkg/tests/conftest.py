from pathlib import Path

import pytest

from pvbatt.ingest import load_config
from pvbatt.lifecycle import SimulationContext

DATA = Path(__file__).resolve().parents[1] / "src" / "pvbatt" / "data"
DEMO_CONFIG = DATA / "demo_config.yaml"


@pytest.fixture(scope="session")
def demo_config():
    return load_config(DEMO_CONFIG)


@pytest.fixture(scope="session")
def fixture_context(demo_config):
    """Bundled customer and weather; shared because geometry caching makes it cheap to reuse."""
    return SimulationContext.from_config(demo_config)


def pytest_terminal_summary(terminalreporter):
    import sys

    lines = getattr(sys.modules.get("test_acceptance"), "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
