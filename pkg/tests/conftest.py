import pytest

from qsg import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the active backend once so timed tests measure the algorithm
    _kernels.warm_up()
