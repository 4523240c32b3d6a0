import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng) -> np.ndarray:
    """Random full-rank 2x2 density matrix."""
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = X @ X.conj().T
    return rho / rho.trace()


def random_bloch(rng, pure: bool = False) -> np.ndarray:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if pure:
        return v
    return v * rng.uniform(0.0, 1.0) ** (1.0 / 3.0)
