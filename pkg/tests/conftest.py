import numpy as np
import pytest

from cdpacct import OutcomeDist


def random_dist(rng: np.random.Generator, size: int, allow_zero: bool = False) -> OutcomeDist:
    w = rng.random(size) + 0.05
    if allow_zero and size > 1 and rng.random() < 0.4:
        w[int(rng.integers(size))] = 0.0
    w = w / w.sum()
    return OutcomeDist(tuple(range(size)), tuple(float(x) for x in w))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(987654321)
