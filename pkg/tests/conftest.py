import numpy as np
import pytest

from cfrem.scenario import (APConfig, PathLossParams, Scenario, UELocationPattern, bundled_scenario,
                            default_scenario)

# criterion number -> one-line PASS/FAIL verdict, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def three_ap():
    return bundled_scenario("three_ap")


def centroid_cluster(scenario, n=8, radius=0.6, toward_first=3.0):
    """UEs on a small circle at the AP centroid, nudged toward the first AP."""
    xy = np.array([ap.position[:2] for ap in scenario.aps])
    c = xy.mean(axis=0)
    u = (xy[0] - c) / np.linalg.norm(xy[0] - c)
    c = c + toward_first * u
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return UELocationPattern(np.column_stack([c[0] + radius * np.cos(t), c[1] + radius * np.sin(t)]))


def adjacent_pattern(scenario, offset=5.0):
    """One UE ``offset`` meters from each AP, toward the AP centroid."""
    xy = np.array([ap.position[:2] for ap in scenario.aps])
    c = xy.mean(axis=0)
    d = c - xy
    return UELocationPattern(xy + offset * d / np.linalg.norm(d, axis=1, keepdims=True))


def single_ap_scenario(m=8, p_max_dbm=30.0, **kw):
    kw.setdefault("pathloss", PathLossParams(30.5, 36.7, 0.0))
    return Scenario(aps=(APConfig(0, (250.0, 250.0, 10.0), m, p_max_dbm),), **kw)
