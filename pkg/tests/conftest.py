import pytest
from hypothesis import settings

from homwitness import (
    HomodyneSetting,
    QuadratureSampler,
    SourceModel,
    interfere,
)

settings.register_profile("suite", deadline=None, max_examples=40)
settings.load_profile("suite")


def random_density(rng, dim):
    """Random valid density matrix via a Wishart-style construction."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return m / m.trace().real


@pytest.fixture(scope="session")
def ideal_state():
    """Balanced interference of two perfect single photons (phase 0)."""
    return interfere(SourceModel(arm1=(0.0, 1.0), arm2=(0.0, 1.0)))


@pytest.fixture(scope="session")
def distinguishable_state():
    """Same photons but with zero internal-mode overlap."""
    return interfere(SourceModel(arm1=(0.0, 1.0), arm2=(0.0, 1.0), overlap=0.0))


@pytest.fixture(scope="session")
def imperfect_state():
    """Vacuum-contaminated arms matching the experiment-scale model."""
    return interfere(SourceModel(arm1=(0.36, 0.64), arm2=(0.36, 0.64)))


@pytest.fixture(scope="session")
def imperfect_sampler(imperfect_state):
    return QuadratureSampler(imperfect_state.measured, HomodyneSetting(0.0))


@pytest.fixture(scope="session")
def experiment_scale_samples(imperfect_sampler):
    """The pinned 12,000-record dataset used by the pipeline criteria."""
    return imperfect_sampler.draw(12000, 12)
