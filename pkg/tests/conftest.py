import numpy as np
import pytest

from curvcheck.chains import build_chain, truncate_birth_death
from curvcheck.families import make_example


def two_point_chain(a=1.0, b=1.0):
    return build_chain({"states": ["0", "1"], "rates": [["0", "1", a], ["1", "0", b]]})


def complete_chain(n):
    states = [str(i) for i in range(n)]
    rates = [[x, y, 1.0] for x in states for y in states if x != y]
    return build_chain({"states": states, "rates": rates})


def path_chain(n):
    states = [str(i) for i in range(n)]
    rates = []
    for i in range(n - 1):
        rates.append([states[i], states[i + 1], 1.0])
        rates.append([states[i + 1], states[i], 1.0])
    return build_chain({"states": states, "rates": rates})


def hypercube_chain(d):
    return make_example("hypercube", {"d": d}).chain


def poisson_chain(lam=1.0, cutoff=30):
    return truncate_birth_death(lambda x: lam, lambda x: float(x), cutoff)


@pytest.fixture
def two_point():
    return two_point_chain()


@pytest.fixture
def two_point_12():
    return two_point_chain(1.0, 2.0)


@pytest.fixture
def k3():
    return complete_chain(3)


@pytest.fixture
def k5():
    return complete_chain(5)


@pytest.fixture
def q3():
    return hypercube_chain(3)


@pytest.fixture
def path3():
    return path_chain(3)


@pytest.fixture
def path5():
    return path_chain(5)


@pytest.fixture
def tpois30():
    return poisson_chain(1.0, 30)


def operator_fixtures():
    """The chains the operator identities are exercised on."""
    return {
        "two_point": two_point_chain(),
        "k5": complete_chain(5),
        "q3": hypercube_chain(3),
        "path5": path_chain(5),
        "tpois30": poisson_chain(1.0, 30),
    }


def random_functions(chain, count, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return rng.normal(scale=scale, size=(count, chain.n))
