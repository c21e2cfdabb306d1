import numpy as np
import pytest


class ConstantRng:
    """Stub generator: every normal draw returns a fixed constant.

    Used for zero-noise and deterministic-exit tests.
    """

    def __init__(self, value=0.0):
        self.value = value

    def normal(self, loc=0.0, scale=1.0, size=None):
        if size is None:
            return loc + self.value * scale
        return np.full(size, loc + self.value * scale)

    def standard_normal(self, size=None):
        return self.normal(size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        mid = 0.5 * (low + high)
        return mid if size is None else np.full(size, mid)

    def standard_exponential(self, size=None):
        return 1.0 if size is None else np.full(size, 1.0)


@pytest.fixture
def zero_rng():
    return ConstantRng(0.0)
