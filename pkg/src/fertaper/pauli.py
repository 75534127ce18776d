"""Exact symplectic Pauli algebra.

A Pauli operator on n qubits is stored as ``i**phase_power * X(x) * Z(z)``
where x and z are n-bit vectors and X(x), Z(z) are products of single-qubit
X / Z over the supports of x and z.  The phase power is tracked modulo 4,
which is closed under multiplication, so products are exact including sign.

Qubits are numbered 1..n with qubit 1 the leftmost letter of a label such
as "ZZII" and the most significant tensor factor of the dense matrix.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

DEFAULT_PRUNE_TOL = 1e-12
_DEFAULT_DENSE_CAP = 14

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE = (1, 1j, -1, -1j)

_PREFIXES = {"": 0, "+": 0, "+1": 0, "+i": 1, "i": 1, "-1": 2, "-": 2, "-i": 3}


def dense_qubit_cap() -> int:
    """Qubit ceiling for dense-matrix oracles; FERTAPER_MAX_DENSE_QUBITS overrides."""
    env = os.environ.get("FERTAPER_MAX_DENSE_QUBITS")
    return int(env) if env else _DEFAULT_DENSE_CAP


def _check_dense_size(n: int) -> None:
    cap = dense_qubit_cap()
    if n > cap:
        raise ValueError(
            f"dense matrix on {n} qubits exceeds the cap of {cap}; "
            "set FERTAPER_MAX_DENSE_QUBITS to override"
        )


@dataclass(frozen=True)
class PauliOperator:
    """n-qubit Pauli ``i**phase_power * X(x) * Z(z)`` with exact phase."""

    x: tuple[int, ...]
    z: tuple[int, ...]
    phase_power: int = 0

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise ValueError("x and z bit vectors differ in length")
        object.__setattr__(self, "x", tuple(int(b) & 1 for b in self.x))
        object.__setattr__(self, "z", tuple(int(b) & 1 for b in self.z))
        object.__setattr__(self, "phase_power", int(self.phase_power) % 4)

    # -- constructors ------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls((0,) * n, (0,) * n, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse e.g. "ZZII", "-i" + "XY", "+1YZ".  Qubit 1 is leftmost."""
        text = label.strip()
        prefix = ""
        while text and text[0] not in "IXYZ":
            prefix += text[0]
            text = text[1:]
        if prefix not in _PREFIXES:
            raise ValueError(f"unknown phase prefix {prefix!r} in {label!r}")
        if not text or any(c not in "IXYZ" for c in text):
            raise ValueError(f"invalid Pauli label {label!r}")
        x = tuple(1 if c in "XY" else 0 for c in text)
        z = tuple(1 if c in "ZY" else 0 for c in text)
        n_y = text.count("Y")
        return cls(x, z, (_PREFIXES[prefix] + n_y) % 4)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """Single-letter Pauli at a 1-based qubit index."""
        letters = ["I"] * n
        letters[_check_index(qubit, n) - 1] = letter
        return cls.from_label("".join(letters))

    @classmethod
    def z_string(cls, n: int, qubits) -> "PauliOperator":
        z = [0] * n
        for q in qubits:
            z[_check_index(q, n) - 1] = 1
        return cls((0,) * n, tuple(z), 0)

    @classmethod
    def x_string(cls, n: int, qubits) -> "PauliOperator":
        x = [0] * n
        for q in qubits:
            x[_check_index(q, n) - 1] = 1
        return cls(tuple(x), (0,) * n, 0)

    @classmethod
    def from_xz(cls, x, z, phase_power: int = 0) -> "PauliOperator":
        return cls(tuple(int(b) for b in x), tuple(int(b) for b in z), phase_power)

    # -- structure ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def y_count(self) -> int:
        return sum(a & b for a, b in zip(self.x, self.z))

    @property
    def weight(self) -> int:
        return sum(a | b for a, b in zip(self.x, self.z))

    def support(self) -> tuple[int, ...]:
        """1-based qubits on which the operator acts non-trivially."""
        return tuple(i + 1 for i, (a, b) in enumerate(zip(self.x, self.z)) if a | b)

    def letter_at(self, qubit: int) -> str:
        i = _check_index(qubit, self.n) - 1
        return "IXZY"[self.x[i] + 2 * self.z[i]]

    @property
    def label(self) -> str:
        """Letter string with a phase prefix, inverse of from_label."""
        letters = ["IXZY"[a + 2 * b] for a, b in zip(self.x, self.z)]
        head = ("", "+i", "-1", "-i")[(self.phase_power - self.y_count) % 4]
        return head + "".join(letters)

    def is_hermitian(self) -> bool:
        return (self.phase_power - self.y_count) % 2 == 0

    def hermitian_canonical(self) -> tuple[complex, "PauliOperator"]:
        """Split into (scalar, plain letter Pauli with +1 prefix).

        The returned Pauli is Hermitian and the scalar carries whatever
        power of i the original phase contributed.
        """
        base = PauliOperator(self.x, self.z, self.y_count)
        return _PHASE[(self.phase_power - self.y_count) % 4], base

    def adjoint(self) -> "PauliOperator":
        xz = sum(a & b for a, b in zip(self.x, self.z))
        return PauliOperator(self.x, self.z, (-self.phase_power + 2 * xz) % 4)

    def delete_qubits(self, qubits) -> "PauliOperator":
        """Drop the given 1-based qubit positions (they must act as I or have
        been accounted for by the caller)."""
        drop = {_check_index(q, self.n) - 1 for q in qubits}
        x = tuple(b for i, b in enumerate(self.x) if i not in drop)
        z = tuple(b for i, b in enumerate(self.z) if i not in drop)
        return PauliOperator(x, z, self.phase_power)

    # -- dense oracle ------------------------------------------------

    def dense(self) -> np.ndarray:
        """Exact 2^n x 2^n matrix; qubit 1 is the most significant factor."""
        n = self.n
        _check_dense_size(n)
        dim = 1 << n
        xm = bits_int(self.x)
        zm = bits_int(self.z)
        cols = np.arange(dim, dtype=np.int64)
        rows = cols ^ xm
        signs = 1 - 2 * (np.bitwise_count(cols & zm).astype(np.int64) & 1)
        mat = np.zeros((dim, dim), dtype=complex)
        mat[rows, cols] = _PHASE[self.phase_power] * signs
        return mat

    def apply_to_index(self, state: int) -> tuple[int, complex]:
        """Image basis index and amplitude of |state> under the operator."""
        xm = bits_int(self.x)
        zm = bits_int(self.z)
        sign = -1 if bin(state & zm).count("1") & 1 else 1
        return state ^ xm, _PHASE[self.phase_power] * sign

    def __repr__(self) -> str:
        return f"PauliOperator({self.label!r})"


def _check_index(q: int, n: int) -> int:
    if not 1 <= q <= n:
        raise IndexError(f"qubit index {q} out of range 1..{n}")
    return q


def bits_int(bits) -> int:
    """Pack bits (first = most significant) into an int."""
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def pauli_multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Exact product a·b including phase."""
    if a.n != b.n:
        raise ValueError("length mismatch in Pauli product")
    # Z(z_a) X(x_b) = (-1)^(z_a . x_b) X(x_b) Z(z_a)
    swap = sum(p & q for p, q in zip(a.z, b.x))
    x = tuple(p ^ q for p, q in zip(a.x, b.x))
    z = tuple(p ^ q for p, q in zip(a.z, b.z))
    return PauliOperator(x, z, (a.phase_power + b.phase_power + 2 * swap) % 4)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """Symplectic commutation test: a_x.b_z + a_z.b_x = 0 mod 2."""
    if a.n != b.n:
        raise ValueError("length mismatch in commutation test")
    acc = sum((p & q) for p, q in zip(a.x, b.z)) + sum((p & q) for p, q in zip(a.z, b.x))
    return acc % 2 == 0


@dataclass(frozen=True)
class QubitHamiltonian:
    """Weighted sum of Pauli operators on a fixed number of qubits."""

    qubit_count: int
    terms: tuple[tuple[complex, PauliOperator], ...]

    def __post_init__(self):
        for _, op in self.terms:
            if op.n != self.qubit_count:
                raise ValueError("term length does not match qubit count")
        object.__setattr__(
            self, "terms", tuple((complex(c), op) for c, op in self.terms)
        )

    @classmethod
    def from_terms(cls, n: int, terms) -> "QubitHamiltonian":
        return cls(n, tuple(terms))

    @classmethod
    def zero(cls, n: int) -> "QubitHamiltonian":
        return cls(n, ())

    def canonicalize(self, tol: float = DEFAULT_PRUNE_TOL) -> "QubitHamiltonian":
        """Merge equal Pauli strings, prune tiny coefficients, sort terms.

        Phases are folded into coefficients so every surviving Pauli is the
        plain Hermitian letter form; term order is lexicographic on (x|z).
        """
        acc: dict[tuple, complex] = {}
        for coeff, op in self.terms:
            factor, base = op.hermitian_canonical()
            key = (base.x, base.z)
            acc[key] = acc.get(key, 0.0) + coeff * factor
        merged = []
        for (x, z) in sorted(acc):
            c = acc[(x, z)]
            if abs(c) >= tol:
                merged.append((c, PauliOperator(x, z, sum(a & b for a, b in zip(x, z)))))
        return QubitHamiltonian(self.qubit_count, tuple(merged))

    def dense(self) -> np.ndarray:
        """Exact dense matrix of the sum (guarded by the qubit cap)."""
        n = self.qubit_count
        _check_dense_size(n)
        dim = 1 << n
        mat = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim, dtype=np.int64)
        for coeff, op in self.terms:
            xm = bits_int(op.x)
            zm = bits_int(op.z)
            signs = 1 - 2 * (np.bitwise_count(cols & zm).astype(np.int64) & 1)
            mat[cols ^ xm, cols] += coeff * _PHASE[op.phase_power] * signs
        return mat

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        for coeff, op in self.canonicalize().terms:
            if abs(coeff.imag) > tol:  # canonical Paulis are Hermitian
                return False
        return True

    def term_map(self) -> dict[tuple, complex]:
        """Canonical (x, z) -> coefficient mapping."""
        return {(op.x, op.z): c for c, op in self.canonicalize().terms}

    def operator_set(self, include_identity: bool = False) -> set[str]:
        """Labels of the distinct canonical Paulis (identity optional)."""
        out = set()
        for _, op in self.canonicalize().terms:
            if op.weight == 0 and not include_identity:
                continue
            out.add(op.label)
        return out

    def __add__(self, other: "QubitHamiltonian") -> "QubitHamiltonian":
        if other.qubit_count != self.qubit_count:
            raise ValueError("qubit count mismatch")
        return QubitHamiltonian(self.qubit_count, self.terms + other.terms)

    def scaled(self, factor: complex) -> "QubitHamiltonian":
        return QubitHamiltonian(
            self.qubit_count, tuple((factor * c, op) for c, op in self.terms)
        )

    def product(self, other: "QubitHamiltonian") -> "QubitHamiltonian":
        """Term-by-term operator product, merged eagerly."""
        if other.qubit_count != self.qubit_count:
            raise ValueError("qubit count mismatch")
        out = []
        for ca, opa in self.terms:
            for cb, opb in other.terms:
                out.append((ca * cb, pauli_multiply(opa, opb)))
        return QubitHamiltonian(self.qubit_count, tuple(out)).canonicalize()

    def __len__(self) -> int:
        return len(self.terms)


def hamiltonian_to_text(h: QubitHamiltonian) -> str:
    """Serialize as lines "re im PAULISTRING" (canonical order)."""
    lines = [f"# qubits {h.qubit_count}"]
    for coeff, op in h.canonicalize().terms:
        lines.append(f"{coeff.real:.17g} {coeff.imag:.17g} {op.label}")
    return "\n".join(lines) + "\n"


def hamiltonian_from_text(text: str) -> QubitHamiltonian:
    """Parse the line format produced by :func:`hamiltonian_to_text`."""
    terms = []
    n = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"malformed Hamiltonian line: {raw!r}")
        re_c, im_c, label = parts
        op = PauliOperator.from_label(label)
        if n is None:
            n = op.n
        elif op.n != n:
            raise ValueError("inconsistent Pauli lengths in file")
        terms.append((complex(float(re_c), float(im_c)), op))
    if n is None:
        raise ValueError("no Pauli terms found")
    return QubitHamiltonian(n, tuple(terms)).canonicalize()


def kron_chain(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def pauli_matrix_naive(label: str) -> np.ndarray:
    """Independent dense oracle: literal Kronecker product of letters."""
    text = label.strip()
    prefix = ""
    while text and text[0] not in "IXYZ":
        prefix += text[0]
        text = text[1:]
    return _PHASE[_PREFIXES[prefix]] * kron_chain([_SINGLE[c] for c in text])
