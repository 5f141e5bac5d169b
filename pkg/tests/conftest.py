import numpy as np
import pytest
from hypothesis import settings

from mubkit import catalog

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def catalog_chms():
    """Every catalog matrix that is a CHM with its default parameters."""
    return {
        "fourier6": catalog.fourier6(),
        "spectral": catalog.spectral(),
        "spectral_prime": catalog.spectral_prime(),
        "fourier_family": catalog.fourier_family(np.exp(0.7j), np.exp(-1.9j)),
        "h1": catalog.h1(),
        "h2": catalog.build("h2"),
        "h3": catalog.build("h3"),
        "sr3_example": catalog.sr3_example(),
        "sr4_example": catalog.sr4_example(),
        "bjorck": catalog.bjorck(),
        "dita": catalog.dita(),
    }


@pytest.fixture(scope="session")
def chms():
    return catalog_chms()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unimodular(rng, n=None):
    return np.exp(2j * np.pi * rng.random(n))
