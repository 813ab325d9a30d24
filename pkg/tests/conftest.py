import numpy as np
import pytest

from cstarflow import AlgebraElement, BlockShape, FlowGenerator, HermitianElement
from cstarflow.sampling import rng


@pytest.fixture
def shape23():
    return BlockShape([2, 3])


def make_rng(seed: int) -> np.random.Generator:
    return rng(seed)


def e12(n: int = 2) -> AlgebraElement:
    """Single-block matrix unit with a one in position (1, 2)."""
    m = np.zeros((n, n), dtype=complex)
    m[0, 1] = 1.0
    return AlgebraElement.from_blocks([m])


def diag_flow(*diag: float) -> FlowGenerator:
    """Automorphism flow of a single diagonal block."""
    h = HermitianElement.from_blocks([np.diag(diag).astype(complex)])
    return FlowGenerator(h, h)
