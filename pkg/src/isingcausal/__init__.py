"""Ising-cluster ring eigenstates and the causal-order game.

Submodules
----------
kernel          Pauli-string algebra and dense linear algebra
lattice         ring Hamiltonians and the controlled-Z split
fermions        free-fermion solution of the transverse-field Ising ring
game            process matrices and success probabilities
correspondence  observables of the four-site ring versus game strategies
phases          order parameters and transition location
sweep           angle sweeps and CSV/JSON output
"""

from ._kernels import BACKEND
from .errors import CapacityError, CorrespondenceError, NumericalError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapacityError",
    "CorrespondenceError",
    "NumericalError",
    "ValidationError",
    "__version__",
]
