import pytest

from kcert.identities import Sampler
from kcert.instances import (
    clutching_diagram,
    cover_diagram,
    propagation_algebra,
    quotient_algebra,
    suite_algebras,
    trivial_algebra,
    trivial_diagram,
)


@pytest.fixture
def trivial():
    return trivial_algebra()


@pytest.fixture
def quotient():
    return quotient_algebra()


@pytest.fixture
def propagation():
    return propagation_algebra()


@pytest.fixture
def all_algebras():
    return suite_algebras()


@pytest.fixture
def clutching():
    return clutching_diagram()


@pytest.fixture
def cover():
    return cover_diagram()


@pytest.fixture
def trivial_mv():
    return trivial_diagram()


@pytest.fixture
def sampler():
    return Sampler(20260810)
