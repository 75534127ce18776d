import numpy as np
import pytest

from fertaper.fermion import FermionHamiltonian
from fertaper.graphs import cycle_chord_graph
from fertaper.pauli import PauliOperator, QubitHamiltonian

# The 14 Pauli strings of the four-qubit minimal-basis hydrogen Hamiltonian.
H2_OPERATORS = (
    "ZIII", "IZII", "IIZI", "IIIZ",
    "ZZII", "ZIZI", "ZIIZ", "IZZI", "IZIZ", "IIZZ",
    "YYXX", "XYYX", "YXXY", "XXYY",
)

# Images of the table after the three symmetry reflections (paired qubits
# 2, 3, 4 act by I or X only; signs live in the coefficients).
H2_TRANSFORMED = (
    "ZIII", "ZXII", "ZIXI", "ZIIX",
    "IXII", "IIXI", "IIIX", "IXXI", "IXIX", "IIXX",
    "XIXX", "XIIX", "XXXI", "XXII",
)


@pytest.fixture
def h2_table() -> QubitHamiltonian:
    """The hydrogen operator table with generic distinct coefficients."""
    coeffs = [0.31 + 0.07 * i for i in range(len(H2_OPERATORS))]
    return QubitHamiltonian(
        4,
        tuple((c, PauliOperator.from_label(l)) for c, l in zip(coeffs, H2_OPERATORS)),
    )


def minimal_basis_hydrogen() -> FermionHamiltonian:
    """Four-spin-orbital hydrogen molecule, interleaved spin ordering.

    Spatial integrals in hartree for the standard minimal basis at the
    equilibrium bond length; two-body entries are assembled from the
    (bra-bra|ket-ket) table with spin selection rules.
    """
    e_low, e_high = -1.252477, -0.475934
    j_ll, j_hh, j_lh, k_lh = 0.674493, 0.697397, 0.663472, 0.181287
    orbital = {1: 0, 2: 0, 3: 1, 4: 1}
    spin = {1: 0, 2: 1, 3: 0, 4: 1}
    pair_values = {
        (0, 0, 0, 0): j_ll, (1, 1, 1, 1): j_hh,
        (0, 0, 1, 1): j_lh, (1, 1, 0, 0): j_lh,
        (0, 1, 0, 1): k_lh, (1, 0, 1, 0): k_lh,
        (0, 1, 1, 0): k_lh, (1, 0, 0, 1): k_lh,
    }
    t = np.diag([e_low, e_low, e_high, e_high]).astype(complex)
    u: dict[tuple[int, int, int, int], complex] = {}
    for p in range(1, 5):
        for q in range(1, 5):
            for r in range(1, 5):
                for s in range(1, 5):
                    if spin[p] != spin[r] or spin[q] != spin[s]:
                        continue
                    val = pair_values.get(
                        (orbital[p], orbital[r], orbital[q], orbital[s]), 0.0
                    )
                    if val == 0.0 or p == q or r == s:
                        continue
                    key = (p, q, s, r)
                    u[key] = u.get(key, 0.0) + 0.5 * val
    with np.errstate(all="ignore"):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return FermionHamiltonian(4, 2, t, u)


@pytest.fixture
def h2_fermionic() -> FermionHamiltonian:
    return minimal_basis_hydrogen()


@pytest.fixture
def fig3_graph():
    """Girth-6 bipartite graph on 12 vertices with 16 edges."""
    return cycle_chord_graph(8, 2)
