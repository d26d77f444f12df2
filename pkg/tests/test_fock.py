import numpy as np
import pytest

from magnonblockade.fock import (
    HilbertSpec,
    Ket,
    Operator,
    basis_ket,
    embed,
    expectation,
    ladder_ops,
    vacuum_ket,
)
from magnonblockade.steadystate import DensityMatrix

SQRT2 = np.sqrt(2.0)


def test_ladder_entries_cutoff3():
    a, adag, n = ladder_ops(3)
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = 1.0
    expected[1, 2] = SQRT2
    assert np.array_equal(a.matrix, expected)
    assert np.array_equal(adag.matrix, expected.conj().T)


def test_number_operator_cutoff2():
    _, _, n = ladder_ops(2)
    assert np.array_equal(n.matrix, np.diag([0.0, 1.0]).astype(complex))


def test_creation_sqrt_rule():
    _, adag, _ = ladder_ops(4)
    e1 = np.zeros(4, dtype=complex)
    e1[1] = 1.0
    out = adag.matrix @ e1
    expected = np.zeros(4, dtype=complex)
    expected[2] = SQRT2
    assert np.allclose(out, expected, atol=1e-15)


def test_ladder_rejects_small_cutoff():
    with pytest.raises(ValueError):
        ladder_ops(1)


@pytest.mark.parametrize("cutoff", [2, 3, 5, 9])
def test_truncated_commutator(cutoff):
    a, adag, _ = ladder_ops(cutoff)
    comm = a.matrix @ adag.matrix - adag.matrix @ a.matrix
    expected = np.eye(cutoff, dtype=complex)
    expected[-1, -1] = 1.0 - cutoff  # truncation artifact
    assert np.array_equal(comm, expected)


def test_creation_is_exact_adjoint():
    a, adag, _ = ladder_ops(7)
    assert np.array_equal(adag.matrix, a.matrix.conj().T)


def test_hilbert_spec_invariants():
    with pytest.raises(ValueError):
        HilbertSpec((("p", 1),))
    with pytest.raises(ValueError):
        HilbertSpec((("p", 3), ("p", 2)))
    space = HilbertSpec((("p", 3), ("m", 2)))
    assert space.dim == 6
    assert space.labels == ("p", "m")
    # last listed mode varies fastest
    assert space.index((2, 1)) == 5
    assert space.index((1, 0)) == 2
    with pytest.raises(ValueError):
        space.index((3, 0))


def test_embed_matches_kron():
    space = HilbertSpec((("p", 3), ("m", 2)))
    a, _, _ = ladder_ops(3, label="p")
    lifted = embed(a, "p", space)
    assert np.array_equal(lifted.matrix, np.kron(a.matrix, np.eye(2)))


def test_embed_identity():
    space = HilbertSpec((("p", 3), ("m", 2)))
    ident = Operator(HilbertSpec((("m", 2),)), np.eye(2, dtype=complex))
    assert np.array_equal(embed(ident, "m", space).matrix, np.eye(6, dtype=complex))


def test_embedded_number_eigenvalue():
    space = HilbertSpec((("p", 3), ("m", 2)))
    _, _, n = ladder_ops(3, label="p")
    n_p = embed(n, "p", space)
    ket = basis_ket(space, (2, 1))
    assert np.allclose(n_p.matrix @ ket.amplitudes, 2.0 * ket.amplitudes, atol=1e-15)


def test_embed_errors():
    space = HilbertSpec((("p", 3), ("m", 2)))
    a, _, _ = ladder_ops(3)
    with pytest.raises(ValueError):
        embed(a, "q", space)
    with pytest.raises(ValueError):
        embed(a, "m", space)  # dimension 3 vs cutoff 2


def test_embed_homomorphism():
    rng = np.random.default_rng(7)
    space = HilbertSpec((("p", 4), ("m", 3)))
    single = HilbertSpec((("p", 4),))
    a = Operator(single, rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    b = Operator(single, rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    ab = Operator(single, a.matrix @ b.matrix)
    lhs = embed(ab, "p", space).matrix
    rhs = embed(a, "p", space).matrix @ embed(b, "p", space).matrix
    assert np.abs(lhs - rhs).max() < 1e-12


def _pure_density(space, occupations):
    ket = basis_ket(space, occupations)
    return DensityMatrix(space, np.outer(ket.amplitudes, ket.amplitudes.conj()))


def test_expectation_number_eigenstate():
    space = HilbertSpec((("m", 4),))
    _, _, n = ladder_ops(4, label="m")
    rho = _pure_density(space, (2,))
    assert expectation(Operator(space, n.matrix), rho) == pytest.approx(2.0)


def test_expectation_identity_unit_trace():
    space = HilbertSpec((("m", 3),))
    rng = np.random.default_rng(3)
    raw = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = raw @ raw.conj().T
    rho /= np.trace(rho).real
    dm = DensityMatrix(space, rho)
    ident = Operator(space, np.eye(3, dtype=complex))
    assert expectation(ident, dm) == pytest.approx(1.0)


def test_expectation_vacuum_annihilation():
    space = HilbertSpec((("m", 3),))
    a, _, _ = ladder_ops(3, label="m")
    rho = _pure_density(space, (0,))
    assert expectation(Operator(space, a.matrix), rho) == 0


def test_expectation_space_mismatch():
    space_a = HilbertSpec((("m", 3),))
    space_b = HilbertSpec((("m", 4),))
    a, _, _ = ladder_ops(3, label="m")
    rho = _pure_density(space_b, (0,))
    with pytest.raises(ValueError):
        expectation(Operator(space_a, a.matrix), rho)


def test_expectation_linearity():
    rng = np.random.default_rng(11)
    space = HilbertSpec((("m", 4),))
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = DensityMatrix(space, (raw @ raw.conj().T) / np.trace(raw @ raw.conj().T).real)
    op1 = Operator(space, rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    op2 = Operator(space, rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    combined = Operator(space, 2.5 * op1.matrix - 1j * op2.matrix)
    direct = expectation(combined, rho)
    parts = 2.5 * expectation(op1, rho) - 1j * expectation(op2, rho)
    assert abs(direct - parts) < 1e-12


def test_values_are_frozen():
    a, _, _ = ladder_ops(3)
    with pytest.raises(ValueError):
        a.matrix[0, 0] = 1.0
    ket = vacuum_ket(HilbertSpec((("m", 3),)))
    with pytest.raises(ValueError):
        ket.amplitudes[0] = 0.0


def test_ket_norm_and_shape_check():
    space = HilbertSpec((("m", 3),))
    with pytest.raises(ValueError):
        Ket(space, np.ones(4))
    assert vacuum_ket(space).norm() == pytest.approx(1.0)
