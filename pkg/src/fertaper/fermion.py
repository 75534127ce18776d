"""Second-quantized target systems and their dense Fock-space oracle.

A Hamiltonian is a pair of coefficient tensors: a Hermitian one-body matrix
t[a, b] multiplying a'_a a_b, and a sparse four-index map u[(a, b, g, d)]
multiplying a'_a a'_b a_g a_d, with modes numbered 1..M.  Occupation
convention: |1> = occupied, mode 1 is the leftmost bit of a basis label and
the most significant bit of a basis index.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

FOCK_MODE_CAP = 12


@dataclass(frozen=True)
class FockState:
    """Occupation-number basis state of M modes."""

    occ: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "occ", tuple(int(b) & 1 for b in self.occ))

    @classmethod
    def from_modes(cls, m: int, occupied) -> "FockState":
        bits = [0] * m
        for a in occupied:
            bits[a - 1] = 1
        return cls(tuple(bits))

    @classmethod
    def from_index(cls, m: int, index: int) -> "FockState":
        return cls(tuple((index >> (m - 1 - i)) & 1 for i in range(m)))

    @property
    def modes(self) -> int:
        return len(self.occ)

    @property
    def weight(self) -> int:
        return sum(self.occ)

    @property
    def index(self) -> int:
        value = 0
        for b in self.occ:
            value = (value << 1) | b
        return value

    def bit(self, alpha: int) -> int:
        return self.occ[alpha - 1]

    def occupied_modes(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, b in enumerate(self.occ) if b)

    def __repr__(self) -> str:
        return "FockState(" + "".join(str(b) for b in self.occ) + ")"


def weight_n_states(m: int, n: int) -> list[FockState]:
    """All weight-n states of m modes in lexicographic order of the bit string."""
    out = [FockState.from_modes(m, combo) for combo in itertools.combinations(range(1, m + 1), n)]
    out.sort(key=lambda s: s.occ)
    return out


def apply_annihilate(x: FockState, alpha: int):
    """Act with the annihilator of the given mode.

    Returns (sign, new state) with sign (-1)**(occupied modes before alpha),
    or None when the mode is empty.
    """
    if not 1 <= alpha <= x.modes:
        raise IndexError(f"mode {alpha} out of range 1..{x.modes}")
    if x.occ[alpha - 1] == 0:
        return None
    sign = -1 if sum(x.occ[: alpha - 1]) % 2 else 1
    bits = list(x.occ)
    bits[alpha - 1] = 0
    return sign, FockState(tuple(bits))


def apply_create(x: FockState, alpha: int):
    """Act with the creator of the given mode; None when already occupied."""
    if not 1 <= alpha <= x.modes:
        raise IndexError(f"mode {alpha} out of range 1..{x.modes}")
    if x.occ[alpha - 1] == 1:
        return None
    sign = -1 if sum(x.occ[: alpha - 1]) % 2 else 1
    bits = list(x.occ)
    bits[alpha - 1] = 1
    return sign, FockState(tuple(bits))


def apply_op_string(x: FockState, ops) -> tuple[int, FockState] | None:
    """Apply a product of ladder operators, rightmost first.

    ops is a sequence of ("c", mode) / ("a", mode) pairs in left-to-right
    operator order, matching how a product is written on paper.
    """
    sign = 1
    state = x
    for kind, mode in reversed(list(ops)):
        step = apply_create(state, mode) if kind == "c" else apply_annihilate(state, mode)
        if step is None:
            return None
        s, state = step
        sign *= s
    return sign, state


@dataclass(frozen=True)
class FermionObservable:
    """Hermitian one- or two-pair observable i**eps (T +/- T_reversed).

    kind "two_body" uses T = a'_a a_b; kind "four_body" uses
    T = a'_a a'_b a_g a_d.  The reversed product conjugate-transposes T, and
    eps in {0, 1} supplies the i that makes the minus combination Hermitian.
    """

    kind: str
    indices: tuple[int, ...]
    sign_choice: int  # +1 or -1
    epsilon: int

    def __post_init__(self):
        if self.kind not in ("two_body", "four_body"):
            raise ValueError(f"unknown observable kind {self.kind!r}")
        want = 2 if self.kind == "two_body" else 4
        if len(self.indices) != want:
            raise ValueError(f"{self.kind} observable needs {want} indices")
        if self.sign_choice not in (1, -1):
            raise ValueError("sign_choice must be +1 or -1")
        if self.epsilon not in (0, 1):
            raise ValueError("epsilon must be 0 or 1")
        hermitian_eps = 0 if self.sign_choice == 1 else 1
        if self.epsilon != hermitian_eps:
            raise ValueError("epsilon does not make the observable Hermitian")

    @classmethod
    def hop(cls, alpha: int, beta: int, variant: str = "plus") -> "FermionObservable":
        sign = 1 if variant == "plus" else -1
        return cls("two_body", (alpha, beta), sign, 0 if sign == 1 else 1)

    @classmethod
    def pair_hop(cls, alpha, beta, gamma, delta, variant: str = "plus") -> "FermionObservable":
        sign = 1 if variant == "plus" else -1
        return cls("four_body", (alpha, beta, gamma, delta), sign, 0 if sign == 1 else 1)

    def forward_ops(self):
        if self.kind == "two_body":
            a, b = self.indices
            return (("c", a), ("a", b))
        a, b, g, d = self.indices
        return (("c", a), ("c", b), ("a", g), ("a", d))

    def reversed_ops(self):
        if self.kind == "two_body":
            a, b = self.indices
            return (("c", b), ("a", a))
        a, b, g, d = self.indices
        return (("c", d), ("c", g), ("a", b), ("a", a))

    def flip_mask(self, m: int) -> tuple[int, ...]:
        """Modes flipped by the observable (odd-multiplicity indices)."""
        bits = [0] * m
        for a in self.indices:
            bits[a - 1] ^= 1
        return tuple(bits)


def observable_action(obs: FermionObservable, x: FockState) -> list[tuple[complex, FockState]]:
    """Exact sparse action: list of (amplitude, state) with distinct states."""
    phase = 1j if obs.epsilon else 1.0
    acc: dict[tuple[int, ...], complex] = {}
    for ops, pref in ((obs.forward_ops(), 1), (obs.reversed_ops(), obs.sign_choice)):
        hit = apply_op_string(x, ops)
        if hit is None:
            continue
        sign, state = hit
        acc[state.occ] = acc.get(state.occ, 0.0) + phase * pref * sign
    return [(amp, FockState(occ)) for occ, amp in acc.items() if amp != 0]


@dataclass(frozen=True)
class FermionHamiltonian:
    """Coefficient tensors of the target Hamiltonian plus the particle count."""

    modes: int
    particles: int
    t: np.ndarray
    u: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        if t.shape != (self.modes, self.modes):
            raise ValueError(f"t must be {self.modes}x{self.modes}")
        if not np.allclose(t, t.conj().T, atol=1e-12):
            raise ValueError("one-body tensor is not Hermitian")
        object.__setattr__(self, "t", t)
        u = {tuple(int(i) for i in k): complex(v) for k, v in self.u.items()}
        for key, value in u.items():
            if len(key) != 4 or not all(1 <= i <= self.modes for i in key):
                raise ValueError(f"bad interaction index tuple {key}")
            partner = (key[3], key[2], key[1], key[0])
            if partner not in u or abs(u[partner] - value.conjugate()) > 1e-12:
                raise ValueError(
                    f"interaction entry {key} lacks a conjugate partner {partner}"
                )
        object.__setattr__(self, "u", u)
        if not 0 <= self.particles <= self.modes:
            raise ValueError("particle count outside 0..modes")
        top = max(
            [abs(x) for x in np.ravel(t)] + [abs(v) for v in u.values()], default=0.0
        )
        if top > 1 + 1e-9:
            warnings.warn(
                f"coefficient magnitude {top:.3g} exceeds 1; the usual energy-scale "
                "convention keeps all coefficients within [-1, 1]",
                stacklevel=2,
            )

    @property
    def filling_fraction(self) -> float:
        return self.particles / self.modes

    # -- JSON interchange ---------------------------------------------------

    @classmethod
    def from_json(cls, text: str) -> "FermionHamiltonian":
        data = json.loads(text)
        m = int(data["modes"])
        t = np.zeros((m, m), dtype=complex)
        for a, b, re, im in data.get("t", []):
            t[int(a) - 1, int(b) - 1] = complex(re, im)
        u = {}
        for a, b, g, d, re, im in data.get("u", []):
            u[(int(a), int(b), int(g), int(d))] = complex(re, im)
        return cls(m, int(data["particles"]), t, u)

    def to_json(self) -> str:
        t_rows = [
            [a + 1, b + 1, self.t[a, b].real, self.t[a, b].imag]
            for a in range(self.modes)
            for b in range(self.modes)
            if self.t[a, b] != 0
        ]
        u_rows = [[*key, val.real, val.imag] for key, val in sorted(self.u.items())]
        return json.dumps(
            {"modes": self.modes, "particles": self.particles, "t": t_rows, "u": u_rows},
            indent=1,
        )

    # -- exact action ---------------------------------------------------

    def apply_to_state(self, x: FockState) -> dict[tuple[int, ...], complex]:
        """Image of a basis state as a map occupation -> amplitude."""
        out: dict[tuple[int, ...], complex] = {}
        rows, cols = np.nonzero(self.t)
        for a, b in zip(rows, cols):
            hit = apply_op_string(x, (("c", a + 1), ("a", b + 1)))
            if hit is None:
                continue
            sign, state = hit
            out[state.occ] = out.get(state.occ, 0.0) + self.t[a, b] * sign
        for (a, b, g, d), coeff in self.u.items():
            hit = apply_op_string(x, (("c", a), ("c", b), ("a", g), ("a", d)))
            if hit is None:
                continue
            sign, state = hit
            out[state.occ] = out.get(state.occ, 0.0) + coeff * sign
        return out


def dense_fock_matrix(h: FermionHamiltonian) -> np.ndarray:
    """Exact 2^M x 2^M matrix of the Hamiltonian on Fock space."""
    m = h.modes
    if m > FOCK_MODE_CAP:
        raise ValueError(f"dense Fock oracle capped at {FOCK_MODE_CAP} modes, got {m}")
    dim = 1 << m
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        x = FockState.from_index(m, col)
        for occ, amp in h.apply_to_state(x).items():
            mat[FockState(occ).index, col] += amp
    return mat


def observable_matrix(obs: FermionObservable, m: int) -> np.ndarray:
    """Dense Fock-space matrix of a single observable."""
    if m > FOCK_MODE_CAP:
        raise ValueError(f"dense Fock oracle capped at {FOCK_MODE_CAP} modes, got {m}")
    dim = 1 << m
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        for amp, state in observable_action(obs, FockState.from_index(m, col)):
            mat[state.index, col] += amp
    return mat


def restrict_to_sector(matrix: np.ndarray, n: int) -> np.ndarray:
    """Block of a Fock-space matrix on the weight-n subspace.

    Rows and columns follow the lexicographic order of the occupation
    strings, matching :func:`weight_n_states`.
    """
    dim = matrix.shape[0]
    m = dim.bit_length() - 1
    if 1 << m != dim:
        raise ValueError("matrix dimension is not a power of two")
    idx = [s.index for s in weight_n_states(m, n)]
    return matrix[np.ix_(idx, idx)]


def number_operator_matrix(m: int) -> np.ndarray:
    diag = [FockState.from_index(m, i).weight for i in range(1 << m)]
    return np.diag(np.array(diag, dtype=complex))


def sector_matrix(h: FermionHamiltonian, n: int | None = None) -> np.ndarray:
    """Dense matrix of the Hamiltonian restricted to a particle sector."""
    if n is None:
        n = h.particles
    return restrict_to_sector(dense_fock_matrix(h), n)


def sector_matrix_direct(h: FermionHamiltonian, n: int | None = None) -> np.ndarray:
    """Sector matrix built from sparse actions, bypassing the 2^M oracle.

    Same basis order as :func:`sector_matrix`; usable for mode counts past
    the dense Fock cap as long as the sector itself is enumerable.
    """
    if n is None:
        n = h.particles
    states = weight_n_states(h.modes, n)
    index = {s.occ: i for i, s in enumerate(states)}
    mat = np.zeros((len(states), len(states)), dtype=complex)
    for col, st in enumerate(states):
        for occ, amp in h.apply_to_state(st).items():
            mat[index[occ], col] += amp
    return mat


def random_hamiltonian(m: int, n: int, rng: np.random.Generator,
                       interaction_pairs: int = 2) -> FermionHamiltonian:
    """Random Hermitian instance with a generic dense t and a few u entries."""
    raw = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    t = (raw + raw.conj().T) / 4
    t = t / max(1.0, np.abs(t).max())
    u: dict[tuple[int, int, int, int], complex] = {}
    tries = 0
    while len(u) < 2 * interaction_pairs and tries < 50 * interaction_pairs:
        tries += 1
        key = tuple(int(v) for v in rng.integers(1, m + 1, size=4))
        partner = (key[3], key[2], key[1], key[0])
        if key in u or key[0] == key[1] or key[2] == key[3]:
            continue
        val = complex(rng.normal(), rng.normal()) / 4
        if key == partner:
            val = complex(val.real, 0.0)
        u[key] = val
        u[partner] = val.conjugate()
    return FermionHamiltonian(m, n, t, u)
