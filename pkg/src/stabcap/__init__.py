"""Stabilizer-code capacity bounds, census checks and dense fidelity simulation."""

from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.pauli import Bitvec2n, GF4Vector, PauliOperator

__version__ = "0.1.0"

__all__ = [
    "Bitvec2n",
    "BudgetExceeded",
    "GF4Vector",
    "PauliOperator",
    "StabcapError",
    "__version__",
]
