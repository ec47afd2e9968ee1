import pathlib

import pytest

import fracstab as fs

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_report(request):
    """Shared list of labeled acceptance lines, replayed after the run
    (fd-level capture would otherwise swallow them for passing tests)."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance summary")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ex3_system():
    """Unforced system whose reduced characteristic function keeps all
    four terms: s^1.2 + 3 s^0.8 + 3 s^0.7 + 0.5 s^0.4 + 0.75."""
    return fs.load_system(CONFIG_DIR / "example3.toml")


@pytest.fixture(scope="session")
def ex13_system():
    """Forced three-term system: s^1.2 - 0.2 s^0.5 + 0.1."""
    return fs.load_system(CONFIG_DIR / "example13.toml")


@pytest.fixture(scope="session")
def quadratic_system():
    """The ex13 matrix with the x1*x2 perturbation in every component."""
    return fs.load_system(CONFIG_DIR / "example13_quadratic.toml")


@pytest.fixture()
def config_dir():
    return CONFIG_DIR
