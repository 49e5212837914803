"""
Test configuration and fixtures for eventwarp.
"""

import os

import pytest
from hypothesis import settings

from eventwarp.config import reset_config
from eventwarp.curves import Domain, prepare_curve


def pytest_addoption(parser):
    """Integration runs are opt-in."""
    parser.addoption(
        "--run-integration",
        action="store_true",
        default=False,
        help="Run the slow end-to-end checks",
    )


def pytest_collection_modifyitems(config, items):
    """Skip integration tests unless --run-integration is given."""
    if config.getoption("--run-integration"):
        return

    skip_integration = pytest.mark.skip(reason="need --run-integration option to run")
    for item in items:
        if "integration" in item.keywords:
            item.add_marker(skip_integration)


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from default logging and pipeline settings."""
    reset_config()
    yield
    reset_config()


@pytest.fixture
def unit_domain():
    return Domain(0.0, 1.0)


@pytest.fixture
def small_sample(unit_domain):
    """Four anchored curves with different event counts and timing."""
    raw = {
        "early": [0.1, 0.2, 0.35],
        "middle": [0.3, 0.5, 0.7],
        "late": [0.6, 0.75, 0.85, 0.9],
        "spread": [0.05, 0.4, 0.8],
    }
    return [prepare_curve(i, times, unit_domain).unwrap() for i, times in raw.items()]


@pytest.fixture
def events_csv(tmp_path):
    """Event CSV for five curves on [0, 10]."""
    path = tmp_path / "events.csv"
    rows = ["curve_id,event_time"]
    table = {
        1: [1.0, 3.0, 6.0],
        2: [2.0, 4.0, 7.0, 8.0],
        3: [1.5, 2.5],
        4: [5.0, 6.0, 9.0],
        5: [0.5, 4.5, 6.5],
    }
    for curve_id, times in table.items():
        rows.extend(f"{curve_id},{t}" for t in times)
    path.write_text("\n".join(rows) + "\n")
    return path


# EVENTWARP_HYPOTHESIS=ci for the longer run
settings.register_profile("dev", max_examples=25)
settings.register_profile("ci", max_examples=200, print_blob=True)
settings.load_profile(os.environ.get("EVENTWARP_HYPOTHESIS", "dev"))
