import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow test; pass --runslow to include")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def kernels():
    from gravdg.backend import get_kernels
    return get_kernels()


@pytest.fixture(scope="session")
def numpy_kernels():
    from gravdg.backend import get_kernels
    return get_kernels("numpy")
