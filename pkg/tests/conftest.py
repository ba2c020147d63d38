import numpy as np
import pytest

from lsap_mpc.model import Sense, WeightMatrix


def rand_matrix(n, seed, hi=100, cols=None, lo=0, sense=Sense.MINIMIZE):
    rng = np.random.default_rng(seed)
    return WeightMatrix(rng.integers(lo, hi, size=(n, cols or n)).tolist(), sense)


@pytest.fixture(scope="session")
def zk_ctx():
    from lsap_mpc.zk import setup

    return setup()


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
