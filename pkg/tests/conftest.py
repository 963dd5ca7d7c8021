import random
from fractions import Fraction

import pytest

from modules.certify import SosInstance
from modules.instances import builtin_text
from modules.polyring import Polynomial, RingContext

SEEDS = range(100)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the long Groebner computations")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running certificate computation")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def example_2_1() -> SosInstance:
    return SosInstance.from_text("example-2.1", builtin_text("example-2.1"))


@pytest.fixture(scope="session")
def example_2_2() -> SosInstance:
    return SosInstance.from_text("example-2.2", builtin_text("example-2.2"))


@pytest.fixture(scope="session")
def stage1_2_2(example_2_2):
    from modules.certify import stage1_pin_summands

    return stage1_pin_summands(example_2_2)


@pytest.fixture
def random_polynomial():
    """Factory for small random sparse polynomials with rational coefficients."""

    def make(rng: random.Random, ctx: RingContext, terms: int = 4, max_exp: int = 3, degree=None) -> Polynomial:
        out = {}
        for _ in range(rng.randint(0, terms)):
            if degree is None:
                m = tuple(rng.randint(0, max_exp) for _ in range(ctx.n))
            else:
                cuts = sorted(rng.randint(0, degree) for _ in range(ctx.n - 1))
                m = tuple(b - a for a, b in zip([0] + cuts, cuts + [degree]))
            out[m] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        return Polynomial(ctx, out)

    return make
