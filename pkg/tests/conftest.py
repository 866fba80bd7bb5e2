import numpy as np
import pytest

import nctheta as nc
from nctheta.theta import HermitianFormContext

# Corpus instances reused across test modules.  Continuous shifts are kept
# on the 0.05 grid so quadrature oracles can represent every translate
# exactly; the lattice blocks are chosen so no theta zero is reachable at
# the radii the tests touch.


@pytest.fixture(scope="session")
def inst_1_0():
    emb = nc.canonical_embedding(1, 0, theta=[0.5])
    return emb, np.array([[1j]])


@pytest.fixture(scope="session")
def inst_2_0():
    emb = nc.canonical_embedding(2, 0, theta=[0.5, 0.25])
    omega = np.array([[0.3 + 1.0j, 0.1 + 0.2j],
                      [0.1 + 0.2j, -0.2 + 1.5j]])
    return emb, omega


@pytest.fixture(scope="session")
def inst_1_2():
    emb = nc.canonical_embedding(1, 2, theta=[0.5], Q=np.eye(2),
                                 Delta=np.diag([0.2, 0.7]))
    return emb, np.array([[2j]])


@pytest.fixture(scope="session")
def inst_0_2():
    emb = nc.canonical_embedding(0, 2, Q=[[2, 1], [0, 1]],
                                 Delta=[[0.15, 0.0], [0.0, 0.25]])
    return emb, np.zeros((0, 0), dtype=complex)


@pytest.fixture(scope="session")
def inst_general():
    # Non-canonical embedding with a mixed integer row; the torus row is
    # arranged so r = 0.5 (mod 1) needs an even integer block, keeping
    # every reachable translation factor nonzero.
    phi = np.array([
        [0.4, 0.1, 0.0],
        [0.3, 1.0, 0.0],
        [1.0, 0.0, 2.0],
        [0.05, 0.1, 0.1],
    ])
    return nc.EmbeddingMap(p=1, q=1, phi=phi)


@pytest.fixture(scope="session")
def corpus(inst_1_0, inst_2_0, inst_1_2, inst_0_2):
    return {"p1q0": inst_1_0, "p2q0": inst_2_0,
            "p1q2": inst_1_2, "p0q2": inst_0_2}


def make_context(omega) -> HermitianFormContext:
    return HermitianFormContext(omega)
