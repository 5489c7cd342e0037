import pytest

from qgrav import derive_orbit, load_planets


@pytest.fixture(scope="session")
def planets():
    return {p.name: p for p in load_planets()}


@pytest.fixture(scope="session")
def mercury(planets):
    return planets["Mercury"]


@pytest.fixture(scope="session")
def venus(planets):
    return planets["Venus"]


@pytest.fixture(scope="session")
def earth(planets):
    return planets["Earth"]


@pytest.fixture(scope="session")
def mercury_orbit(mercury):
    return derive_orbit(mercury)
