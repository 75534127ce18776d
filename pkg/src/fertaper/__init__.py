"""fertaper: fermion-to-qubit encodings, symmetry tapering, sparse simulators."""

from fertaper.pauli import (
    PauliOperator,
    QubitHamiltonian,
    commutes,
    pauli_multiply,
)

__all__ = [
    "PauliOperator",
    "QubitHamiltonian",
    "commutes",
    "pauli_multiply",
]

__version__ = "0.1.0"
