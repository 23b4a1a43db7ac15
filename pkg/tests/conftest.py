import numpy as np
import pytest

from ftacs.scenario import paper_budget, paper_gains


@pytest.fixture
def gains():
    return paper_gains()


@pytest.fixture
def budget_free():
    return paper_budget(rho_E=0.0)


@pytest.fixture
def budget_faulty():
    return paper_budget(rho_E=0.08)


@pytest.fixture
def rng():
    return np.random.default_rng(20190430)
