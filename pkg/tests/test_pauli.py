import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fertaper.pauli import (
    PauliOperator,
    QubitHamiltonian,
    commutes,
    hamiltonian_from_text,
    hamiltonian_to_text,
    pauli_matrix_naive,
    pauli_multiply,
)


def labels(n, max_size=None):
    return st.text(alphabet="IXYZ", min_size=n, max_size=max_size or n)


class TestMultiply:
    def test_x_times_z_is_minus_i_y(self):
        p = pauli_multiply(PauliOperator.from_label("X"), PauliOperator.from_label("Z"))
        assert p.label == "-iY"

    def test_z_strings_commute_and_cancel(self):
        a = PauliOperator.from_label("ZZI")
        b = PauliOperator.from_label("ZIZ")
        assert pauli_multiply(a, b).label == "IZZ"

    def test_yyxx_times_zzii(self):
        # frozen from the dense 16x16 product: YYXX . ZZII = -XXXX
        p = pauli_multiply(
            PauliOperator.from_label("YYXX"), PauliOperator.from_label("ZZII")
        )
        assert p.label == "-1XXXX"

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pauli_multiply(PauliOperator.from_label("X"), PauliOperator.from_label("XX"))

    @given(labels(1, 4), labels(1, 4))
    @settings(max_examples=120, deadline=None)
    def test_matches_dense_product(self, la, lb):
        n = min(len(la), len(lb))
        la, lb = la[:n], lb[:n]
        a, b = PauliOperator.from_label(la), PauliOperator.from_label(lb)
        got = pauli_multiply(a, b).dense()
        want = pauli_matrix_naive(la) @ pauli_matrix_naive(lb)
        assert np.array_equal(got, want)

    def test_matches_dense_product_wide(self):
        rng = np.random.default_rng(77)
        for _ in range(20):
            la = "".join(rng.choice(list("IXYZ"), size=8))
            lb = "".join(rng.choice(list("IXYZ"), size=8))
            a, b = PauliOperator.from_label(la), PauliOperator.from_label(lb)
            got = pauli_multiply(a, b).dense()
            assert np.array_equal(got, a.dense() @ b.dense())


class TestCommutes:
    def test_xx_zz(self):
        assert commutes(PauliOperator.from_label("XX"), PauliOperator.from_label("ZZ"))

    def test_xi_zz(self):
        assert not commutes(PauliOperator.from_label("XI"), PauliOperator.from_label("ZZ"))

    @given(labels(1, 4), labels(1, 4))
    @settings(max_examples=120, deadline=None)
    def test_matches_dense_commutator(self, la, lb):
        n = min(len(la), len(lb))
        la, lb = la[:n], lb[:n]
        a, b = PauliOperator.from_label(la), PauliOperator.from_label(lb)
        da, db = a.dense(), b.dense()
        assert commutes(a, b) == np.allclose(da @ db, db @ da)

    def test_h2_generator_commutes_with_table(self, h2_table):
        tau = PauliOperator.from_label("ZZII")
        assert all(commutes(tau, op) for _, op in h2_table.terms)


class TestDense:
    def test_single_z(self):
        h = QubitHamiltonian(1, ((1.0, PauliOperator.from_label("Z")),))
        assert np.array_equal(h.dense(), np.diag([1.0, -1.0]))

    def test_term_merging_before_dense(self):
        h = QubitHamiltonian(
            1,
            ((0.5, PauliOperator.from_label("X")), (0.5, PauliOperator.from_label("X"))),
        )
        assert np.array_equal(h.canonicalize().dense(), pauli_matrix_naive("X"))

    def test_swap_projector_eigenvalues(self):
        # (identity + two-qubit swap)/2 written in the Pauli basis
        terms = tuple(
            (0.75 if l == "II" else 0.25, PauliOperator.from_label(l))
            for l in ("II", "XX", "YY", "ZZ")
        )
        h = QubitHamiltonian(2, terms)
        vals = np.sort(np.linalg.eigvalsh(h.dense()))
        assert np.allclose(vals, [0.0, 1.0, 1.0, 1.0])

    def test_size_guard(self, monkeypatch):
        monkeypatch.setenv("FERTAPER_MAX_DENSE_QUBITS", "3")
        with pytest.raises(ValueError):
            PauliOperator.identity(4).dense()
        monkeypatch.setenv("FERTAPER_MAX_DENSE_QUBITS", "4")
        PauliOperator.identity(4).dense()

    @given(labels(1, 5))
    @settings(max_examples=80, deadline=None)
    def test_matches_naive_kron(self, label):
        assert np.array_equal(
            PauliOperator.from_label(label).dense(), pauli_matrix_naive(label)
        )


class TestCanonicalize:
    def test_cancellation(self):
        h = QubitHamiltonian(
            1, ((1.0, PauliOperator.from_label("X")), (-1.0, PauliOperator.from_label("X")))
        )
        assert len(h.canonicalize()) == 0

    def test_merge(self):
        h = QubitHamiltonian(
            1, ((0.3, PauliOperator.from_label("Z")), (0.4, PauliOperator.from_label("Z")))
        )
        merged = h.canonicalize()
        assert len(merged) == 1
        assert merged.terms[0][0] == pytest.approx(0.7)

    def test_idempotent_and_dense_preserving(self):
        rng = np.random.default_rng(4)
        ops = ["XY", "YZ", "ZI", "XY", "II", "ZZ"]
        h = QubitHamiltonian(
            2,
            tuple(
                (complex(rng.normal(), rng.normal()), PauliOperator.from_label(l))
                for l in ops
            ),
        )
        c1 = h.canonicalize()
        c2 = c1.canonicalize()
        assert c1.terms == c2.terms
        assert np.allclose(h.dense(), c1.dense(), atol=1e-12)

    def test_phase_folded_into_coefficient(self):
        h = QubitHamiltonian(1, ((1.0, PauliOperator.from_label("-iY")),))
        coeff, op = h.canonicalize().terms[0]
        assert op.label == "Y"
        assert coeff == pytest.approx(-1j)

    def test_deterministic_order(self):
        ops = ["ZZ", "XI", "IY", "YX"]
        h = QubitHamiltonian(
            2, tuple((1.0, PauliOperator.from_label(l)) for l in ops)
        )
        order = [op.label for _, op in h.canonicalize().terms]
        assert order == sorted(order, key=lambda l: PauliOperator.from_label(l).x + PauliOperator.from_label(l).z)


class TestLabels:
    @pytest.mark.parametrize("label", ["X", "-iY", "+iZZ", "-1XYZI", "IIII"])
    def test_round_trip(self, label):
        op = PauliOperator.from_label(label)
        assert PauliOperator.from_label(op.label) == op

    def test_bad_label(self):
        with pytest.raises(ValueError):
            PauliOperator.from_label("XQ")

    def test_hermitian_check(self):
        assert PauliOperator.from_label("Y").is_hermitian()
        assert not PauliOperator.from_label("+iY").is_hermitian()

    @given(labels(1, 4), st.integers(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_hermitian_agrees_with_dense(self, label, phase):
        op = PauliOperator.from_label(label)
        op = PauliOperator(op.x, op.z, phase)
        dense = op.dense()
        assert op.is_hermitian() == np.allclose(dense, dense.conj().T)


class TestTextFormat:
    def test_round_trip(self):
        h = QubitHamiltonian(
            3,
            (
                (0.25, PauliOperator.from_label("ZZI")),
                (-1.5 + 0.0j, PauliOperator.from_label("XIY")),
            ),
        )
        again = hamiltonian_from_text(hamiltonian_to_text(h))
        assert again.term_map() == pytest.approx(h.term_map())

    def test_comments_ignored(self):
        text = "# heading\n1.0 0.0 ZZ\n# trailing\n"
        h = hamiltonian_from_text(text)
        assert len(h) == 1

    def test_phase_prefixed_labels_accepted(self):
        h = hamiltonian_from_text("2.0 0.0 +iXY\n")
        coeff, op = h.terms[0]
        assert op.label == "XY"
        assert coeff == pytest.approx(2j)

    def test_malformed(self):
        with pytest.raises(ValueError):
            hamiltonian_from_text("1.0 ZZ\n")
