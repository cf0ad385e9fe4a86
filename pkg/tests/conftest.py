import numpy as np
import pytest

from preftours.scenario import ScenarioConfig, generate_random_scenario, load_scenario

from oracles import make_env


@pytest.fixture(scope="session")
def coastline_env():
    from importlib import resources

    path = resources.files("preftours") / "data" / "coastline.json"
    return load_scenario(str(path))


@pytest.fixture
def square_env():
    """Four single-point regions at the corners of a square, one robot."""
    return make_env(
        [[(10, 0)], [(0, 10)], [(-10, 0)], [(0, -10)]],
        depot=(0, 0),
        num_robots=1,
        budgets=[60.0],
    )


@pytest.fixture
def two_robot_env():
    """Three regions, two robots, budgets that fit about two visits each."""
    return make_env(
        [[(6, 0), (7, 1)], [(0, 6)], [(-5, -5)]],
        depot=(0, 0),
        num_robots=2,
        budgets=[26.0, 26.0],
    )


@pytest.fixture(scope="session")
def synthetic_env():
    """The default 20-region, 4-robot synthetic scenario."""
    return generate_random_scenario(ScenarioConfig(seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(42)
