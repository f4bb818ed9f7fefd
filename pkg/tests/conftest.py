import numpy as np
import pytest

from fluxwalk import (
    BoundaryCondition,
    LatticeSpec,
    floquet_operator,
    model_params,
    quasienergy_spectrum,
)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(987654321)


@pytest.fixture(scope="session")
def p4_op_60():
    spec = LatticeSpec(60, BoundaryCondition.OPEN)
    return floquet_operator(model_params("P4"), spec)


@pytest.fixture(scope="session")
def p4_spectrum_60(p4_op_60):
    return quasienergy_spectrum(p4_op_60)


def random_params(rng, n):
    """n parameter draws covering the full phase diagram."""
    from fluxwalk import ModelParams

    return [
        ModelParams(M=float(rng.uniform(-4.0, 2.0)), phi=float(rng.uniform(0.0, np.pi / 2)))
        for _ in range(n)
    ]
