import numpy as np
import pytest


def philox(seed: int, salt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, salt], dtype=np.uint64)))


def make_spd(rng: np.random.Generator, p: int, lo: float = 1.0, hi: float = 10.0) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    a = (q * rng.uniform(lo, hi, p)) @ q.T
    return (a + a.T) / 2.0


@pytest.fixture
def rng() -> np.random.Generator:
    return philox(20240901)
