import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from entlock import linalg
from entlock.entropy import entanglement_entropy, entropy, mutual_information, subsystem_entropy
from entlock.errors import BadShape, DimMismatch, NotAState, RankTooLarge
from entlock.states import (
    HADAMARD,
    SIGMA_X,
    SIGMA_Z,
    AbelianGroup,
    DensityOperator,
    Ensemble,
    PureState,
    basis_ensembles,
    flower_purification,
    flower_purification_general,
    flower_state,
    fourier_unitary,
    hadamard_tensor,
    max_entangled,
    maximally_mixed,
    omega_state,
    projector,
    purify,
    random_density,
    random_supported_state,
    sym_antisym_projectors,
    weyl_x,
    weyl_z,
)


def test_density_operator_validation():
    with pytest.raises(NotAState):
        DensityOperator(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(NotAState):
        DensityOperator(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(NotAState):
        DensityOperator(np.array([[0.5, 0.5], [0, 0.5]]), (2,))
    with pytest.raises(DimMismatch):
        DensityOperator(np.eye(4) / 4, (2, 3))
    with pytest.raises(NotAState):
        PureState(np.array([1.0, 1.0]), (2,))


def test_maximally_mixed():
    assert_allclose(maximally_mixed(1).mat, [[1]])
    assert_allclose(maximally_mixed(2).mat, np.diag([0.5, 0.5]))
    assert abs(entropy(maximally_mixed(4)) - 2) < 1e-12


def test_max_entangled():
    phi = max_entangled(2)
    assert_allclose(phi.vec, np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert_allclose(max_entangled(3).marginal([1]).mat, np.eye(3) / 3, atol=1e-12)
    assert abs(entanglement_entropy(max_entangled(3), [0]) - math.log2(3)) < 1e-12


def test_fourier_unitary():
    assert_allclose(fourier_unitary(2), HADAMARD, atol=1e-15)
    for d in (2, 3, 5, 6):
        u = fourier_unitary(d)
        assert np.max(np.abs(np.linalg.matrix_power(u, 4) - np.eye(d))) <= 1e-10
        assert_allclose(np.abs(u) ** 2, np.full((d, d), 1 / d), atol=1e-14)
    # phase convention e^{+2 pi i jk/d}
    assert_allclose(fourier_unitary(3)[1, 1], np.exp(2j * np.pi / 3) / np.sqrt(3))


def test_hadamard_tensor():
    assert_allclose(hadamard_tensor(1), HADAMARD)
    h2 = hadamard_tensor(2)
    assert_allclose(np.abs(h2), np.full((4, 4), 0.5))
    assert_allclose(h2 @ h2, np.eye(4), atol=1e-12)


def test_weyl_operators():
    assert_allclose(weyl_x(2), SIGMA_X)
    assert_allclose(weyl_z(2), SIGMA_Z)
    for d in (2, 3, 4, 5):
        x, z = weyl_x(d), weyl_z(d)
        assert_allclose(z @ x, np.exp(2j * np.pi / d) * x @ z, atol=1e-12)
        assert np.max(np.abs(np.linalg.matrix_power(x, d) - np.eye(d))) <= 1e-10
        assert np.max(np.abs(np.linalg.matrix_power(z, d) - np.eye(d))) <= 1e-10
        u = fourier_unitary(d)
        assert_allclose(z, u @ x @ u.conj().T, atol=1e-12)
        # Fourier columns are eigenvectors of X, basis vectors of Z
        for k in range(d):
            col = u[:, k]
            overlap = np.vdot(col, x @ col)
            assert_allclose(x @ col, overlap * col, atol=1e-12)
        assert_allclose(z, np.diag(np.diag(z)))


def test_abelian_group_variants():
    g = AbelianGroup.binary(2)
    assert g.d == 4 and g.kind == "z2l"
    assert_allclose(g.fourier(), hadamard_tensor(2))
    # element 2 = bits (1, 0), most significant first
    assert_allclose(g.shift(2), np.kron(SIGMA_X, np.eye(2)))
    assert_allclose(g.phase(1), np.kron(np.eye(2), SIGMA_Z))
    with pytest.raises(BadShape):
        AbelianGroup("z2l", 6)
    with pytest.raises(ValueError):
        AbelianGroup("su2", 2)
    c = AbelianGroup.cyclic(3)
    assert_allclose(c.shift(1), weyl_x(3))
    assert_allclose(c.phase(2), weyl_z(3) @ weyl_z(3))


def test_basis_ensembles():
    for d in (2, 3):
        e0, e1 = basis_ensembles(d, fourier_unitary(d))
        assert_allclose(e0.average().mat, np.eye(d) / d, atol=1e-12)
        assert_allclose(e1.average().mat, np.eye(d) / d, atol=1e-12)
    _, e1 = basis_ensembles(2, HADAMARD)
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert_allclose(e1.states[0].mat, np.outer(plus, plus), atol=1e-15)
    assert_allclose(e1.states[1].mat, np.outer(minus, minus), atol=1e-15)
    with pytest.raises(BadShape):
        basis_ensembles(2, np.ones((2, 2)))


def test_ensemble_validation():
    with pytest.raises(NotAState):
        Ensemble(((0.7, maximally_mixed(2)), (0.7, maximally_mixed(2))))
    with pytest.raises(DimMismatch):
        Ensemble(((0.5, maximally_mixed(2)), (0.5, maximally_mixed(3))))
    e0, e1 = basis_ensembles(2, HADAMARD)
    mixed = e0.mix(e1)
    assert len(mixed.items) == 4 and abs(mixed.probs.sum() - 1) < 1e-15


def _flower_oracle(d):
    """Direct sum over (i, j) of |i>|j>|i>|j> U_j|i>."""
    u = fourier_unitary(d)
    vec = np.zeros(d * 2 * d * 2 * d, dtype=complex)
    for i in range(d):
        for j in range(2):
            c = np.eye(d)[:, i] if j == 0 else u[:, i]
            vec += np.kron(np.kron(np.kron(np.kron(np.eye(d)[i], np.eye(2)[j]), np.eye(d)[i]), np.eye(2)[j]), c)
    return vec / np.sqrt(2 * d)


def test_flower_purification():
    for d in (2, 3, 4):
        psi = flower_purification(d)
        assert_allclose(psi.vec, _flower_oracle(d), atol=1e-14)
        assert_allclose(psi.marginal([4]).mat, np.eye(d) / d, atol=1e-12)
        s_c = subsystem_entropy(psi, [4])
        assert abs(s_c - math.log2(d)) < 1e-10
        assert abs(entropy(psi.reduced()) - s_c) < 1e-10
    rho = flower_state(2)
    assert abs(mutual_information(rho, [0, 1], [2, 3]) - 3) < 1e-10


def test_flower_state_block_structure():
    rho = flower_state(2).mat.reshape((2, 2, 2, 2) * 2)
    for idx in np.ndindex(*(2,) * 8):
        i, j, k, l, i2, j2, k2, l2 = idx
        if i != k or j != l or i2 != k2 or j2 != l2:
            assert rho[idx] == 0


def test_flower_general():
    d = 3
    base = flower_purification(d)
    assert_allclose(flower_purification_general(d, [np.eye(d)]).vec, base.vec, atol=1e-12)
    rng = np.random.default_rng(3)
    vs = [linalg.haar_unitary(d, rng) for _ in range(2)]
    psi = flower_purification_general(d, vs)
    assert psi.dims == (3, 4, 3, 4, 3)
    assert abs(np.linalg.norm(psi.vec) - 1) < 1e-12
    assert_allclose(psi.marginal([4]).mat, np.eye(d) / d, atol=1e-12)
    with pytest.raises(BadShape):
        flower_purification_general(1, [np.eye(1)])
    with pytest.raises(BadShape):
        flower_purification_general(2, [np.ones((2, 2))])


def test_sym_antisym_projectors():
    p_sym, p_anti = sym_antisym_projectors(2)
    assert abs(np.trace(p_sym) - 3) < 1e-14 and abs(np.trace(p_anti) - 1) < 1e-14
    for d in (2, 3):
        p_sym, p_anti = sym_antisym_projectors(d)
        f = linalg.swap_operator(d)
        assert np.max(np.abs(p_sym + p_anti - np.eye(d * d))) <= 1e-14
        assert np.max(np.abs(p_sym @ p_anti)) <= 1e-14
        assert np.max(np.abs(f @ p_anti + p_anti)) <= 1e-14


def test_omega_state():
    for d in (2, 3):
        om = omega_state(d)
        assert abs(np.trace(om.mat) - 1) < 1e-12
        assert_allclose(om.marginal([1, 2]).mat, np.eye(d * d) / d**2, atol=1e-12)
        assert abs(subsystem_entropy(om, [2]) - math.log2(d)) < 1e-12
        vals = np.sort(linalg.eigvalsh(om.mat))
        nonzero = vals[vals > 1e-12]
        assert len(nonzero) == d * d
        assert_allclose(nonzero, np.full(d * d, 1 / d**2), atol=1e-12)


def test_random_supported_state():
    rng = np.random.default_rng(11)
    p_sym, p_anti = sym_antisym_projectors(2)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = random_supported_state(p_anti, 1, rng)
    assert_allclose(rho.mat, np.outer(singlet, singlet), atol=1e-12)
    f = linalg.swap_operator(3)
    for proj in sym_antisym_projectors(3):
        rho = random_supported_state(proj, 2, rng)
        assert np.max(np.abs(proj @ rho.mat @ proj - rho.mat)) <= 1e-10
        assert np.max(np.abs(f @ rho.mat @ f - rho.mat)) <= 1e-10
    with pytest.raises(RankTooLarge):
        random_supported_state(p_anti, 2, rng)
    with pytest.raises(BadShape):
        random_supported_state(np.ones((4, 4)), 1, rng)


def test_purify_examples(rng):
    psi = purify(maximally_mixed(2))
    assert psi.dims == (2, 2) and psi.purifying_factor == 1
    assert abs(entanglement_entropy(psi, [0]) - 1) < 1e-12
    pure = purify(projector(np.array([1.0, 0.0])))
    assert pure.dims == (2, 1)
    rho = random_density(4, rng, dims=(2, 2))
    assert_allclose(purify(rho).reduced().mat, rho.mat, atol=1e-10)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_purify_round_trip(d, seed):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, d + 1))
    rho = random_density(d, rng, rank)
    psi = purify(rho)
    assert psi.dims[-1] == rank
    assert np.max(np.abs(psi.reduced().mat - rho.mat)) <= 1e-10
