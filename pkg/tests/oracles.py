"""Independent reference computations used only by the tests."""
import numpy as np
from scipy.linalg import eigh, expm

from zitter.dirac_core import ALPHA, hamiltonian


def evolve(p, psi0, t):
    # phases follow the packet expansion: positive energy ~ e^{+2 pi i W t}
    return expm(2j * np.pi * hamiltonian(p) * t) @ psi0


def oracle_velocity(p, a, b, t):
    """<alpha>(t) for the single-node spinor a + b, by dense matrix exponential."""
    psi = evolve(p, np.asarray(a) + np.asarray(b), t)
    return np.array([np.vdot(psi, A @ psi).real for A in ALPHA])


def oracle_eigen(p):
    return eigh(hamiltonian(p))
