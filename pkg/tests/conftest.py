import pytest

from brewflex import config, runner, synthetic
from brewflex.market import save_hourly_csv


@pytest.fixture(scope="session")
def dataset_239(tmp_path_factory):
    """Bundled synthetic year for the full national population."""
    root = tmp_path_factory.mktemp("dataset_239")
    return synthetic.write_dataset(root, year=2021, n_facilities=239, seed=0,
                                   daily_spread=0.5)


@pytest.fixture(scope="session")
def scenario_239(dataset_239):
    return config.Scenario(year=2021, seed=0, mode="both", files=dataset_239)


@pytest.fixture(scope="session")
def report_239(scenario_239):
    """One full 239-facility both-policy year, shared by the slow tests."""
    return runner.run_scenario(scenario_239)


@pytest.fixture(scope="session")
def dataset_small(tmp_path_factory):
    root = tmp_path_factory.mktemp("dataset_small")
    return synthetic.write_dataset(root, year=2021, n_facilities=12, seed=3,
                                   daily_spread=0.5)


@pytest.fixture(scope="session")
def report_small(dataset_small):
    scen = config.Scenario(year=2021, seed=3, mode="both", files=dataset_small)
    return runner.run_scenario(scen)


@pytest.fixture(scope="session")
def dataset_flat(tmp_path_factory):
    """Synthetic year with constant electricity prices in both areas."""
    root = tmp_path_factory.mktemp("dataset_flat")
    files = synthetic.write_dataset(root, year=2021, n_facilities=24, seed=0)
    for key, area in (("price_dk1", "DK1"), ("price_dk2", "DK2")):
        save_hourly_csv(synthetic.constant_price(2021, area, 400.0), files[key])
    return files
