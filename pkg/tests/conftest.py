import pytest

from numax.wireless import generate_scenario

from helpers import make_asym, make_constant2, make_ex1, unit_scale_scenario


@pytest.fixture
def ex1():
    return make_ex1()


@pytest.fixture
def asym():
    return make_asym()


@pytest.fixture
def constant2():
    return make_constant2()


@pytest.fixture
def small_scenario():
    return unit_scale_scenario()


@pytest.fixture
def generated_scenario():
    return generate_scenario(num_bs=3, num_users=5, seed=11)
