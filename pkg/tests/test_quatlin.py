import numpy as np
import pytest

from qdsmds.quatlin import (EigenResult, NotHermitianError, Quaternion,
                            QuatMatrix, from_adjoint, hamilton_product,
                            hermitian_eig, qmul, qsvd_dominant, quat_conj,
                            quat_hermitian_eigensystem, quat_norm, quat_outer,
                            to_adjoint)

I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)


def random_quat_array(rng, *shape):
    return rng.standard_normal(shape + (4,))


def random_hermitian(rng, n):
    a = QuatMatrix(random_quat_array(rng, n, n))
    b = a.conj_transpose()
    return QuatMatrix(a.data + b.data)


def test_basis_products():
    assert (I * J).isclose(K)
    assert (J * K).isclose(I)
    assert (K * I).isclose(J)
    assert (J * I).isclose(-K)
    assert (I * I).isclose(Quaternion(-1, 0, 0, 0))


def test_norm_square_via_conjugate():
    q = Quaternion(1, 2, 3, 0)
    assert (q * q.conjugate()).isclose(Quaternion(14, 0, 0, 0))
    assert q.norm() == pytest.approx(np.sqrt(14))


def test_scalar_ops():
    q = Quaternion(1, -2, 0.5, 3)
    assert (2 * q).isclose(q * 2)
    assert (q + (-q)).isclose(Quaternion())
    assert (q - q).isclose(Quaternion())
    with pytest.raises(ValueError):
        Quaternion.from_array([1, 2, 3])


def test_hamilton_product_matches_scalar_path():
    rng = np.random.default_rng(7)
    a = random_quat_array(rng, 64)
    b = random_quat_array(rng, 64)
    prod = hamilton_product(a, b)
    for k in range(64):
        expect = qmul(Quaternion.from_array(a[k]), Quaternion.from_array(b[k]))
        assert np.allclose(prod[k], expect.to_array(), atol=1e-13)


def test_norm_multiplicativity():
    rng = np.random.default_rng(11)
    a = random_quat_array(rng, 10_000)
    b = random_quat_array(rng, 10_000)
    lhs = quat_norm(hamilton_product(a, b))
    rhs = quat_norm(a) * quat_norm(b)
    assert np.max(np.abs(lhs - rhs) / rhs) < 1e-12


def test_conjugate_reverses_products():
    rng = np.random.default_rng(13)
    a = random_quat_array(rng, 100)
    b = random_quat_array(rng, 100)
    lhs = quat_conj(hamilton_product(a, b))
    rhs = hamilton_product(quat_conj(b), quat_conj(a))
    assert np.allclose(lhs, rhs, atol=1e-13)


def test_quat_matrix_matmul_and_adjoint_homomorphism():
    rng = np.random.default_rng(17)
    a = QuatMatrix(random_quat_array(rng, 3, 3))
    b = QuatMatrix(random_quat_array(rng, 3, 3))
    direct = to_adjoint(a @ b)
    mapped = to_adjoint(a) @ to_adjoint(b)
    scale = np.abs(mapped).max()
    assert np.abs(direct - mapped).max() / scale < 1e-12


def test_adjoint_respects_conjugate_transpose():
    rng = np.random.default_rng(19)
    a = QuatMatrix(random_quat_array(rng, 4, 2))
    assert np.allclose(to_adjoint(a.conj_transpose()),
                       to_adjoint(a).conj().T, atol=1e-13)


def test_adjoint_of_j_unit():
    j_mat = QuatMatrix(np.array([[[0.0, 0.0, 1.0, 0.0]]]))
    assert np.array_equal(to_adjoint(j_mat), np.array([[0, 1], [-1, 0]], dtype=complex))


def test_adjoint_round_trip():
    rng = np.random.default_rng(23)
    a = QuatMatrix(random_quat_array(rng, 5, 3))
    back = from_adjoint(to_adjoint(a))
    assert np.allclose(back.data, a.data, atol=0)


def test_quat_matrix_identity_and_entry():
    eye = QuatMatrix.identity(3)
    rng = np.random.default_rng(29)
    a = QuatMatrix(random_quat_array(rng, 3, 3))
    assert np.allclose((eye @ a).data, a.data, atol=1e-15)
    q = a.entry(1, 2)
    assert np.allclose(q.to_array(), a.data[1, 2])


def test_hermitian_eig_known_spectra():
    res = hermitian_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert isinstance(res, EigenResult)
    assert np.allclose(res.eigenvalues, [3.0, 1.0])
    herm = np.array([[2.0, 1j], [-1j, 2.0]])
    res = hermitian_eig(herm)
    assert np.allclose(res.eigenvalues, [3.0, 1.0])
    recon = res.eigenvectors @ np.diag(res.eigenvalues) @ res.eigenvectors.conj().T
    assert np.allclose(recon, herm, atol=1e-12)


def test_hermitian_eig_rejects_asymmetric():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        hermitian_eig(np.zeros((2, 3)))


def test_eigensystem_reconstruction_and_orthonormality():
    rng = np.random.default_rng(31)
    k = random_hermitian(rng, 6)
    values, vectors = quat_hermitian_eigensystem(k)
    assert np.all(np.diff(values) <= 1e-12)
    recon = np.zeros_like(k.data)
    for lam, u in zip(values, vectors):
        recon += lam * quat_outer(u)
    scale = np.abs(k.data).max()
    assert np.abs(recon - k.data).max() / scale < 1e-9
    # quaternion orthonormality of eigenvectors
    for s in range(6):
        for t in range(6):
            ip = hamilton_product(quat_conj(vectors[s]), vectors[t]).sum(axis=0)
            expect = np.array([1.0, 0, 0, 0]) if s == t else np.zeros(4)
            assert np.allclose(ip, expect, atol=1e-9)


def test_eigensystem_trace_identity():
    rng = np.random.default_rng(37)
    k = random_hermitian(rng, 7)
    values, _ = quat_hermitian_eigensystem(k)
    trace = np.trace(k.data[..., 0])
    assert values.sum() == pytest.approx(trace, rel=1e-10)


def test_eigenvectors_satisfy_eigen_equation():
    rng = np.random.default_rng(41)
    k = random_hermitian(rng, 5)
    values, vectors = quat_hermitian_eigensystem(k)
    for lam, u in zip(values, vectors):
        ku = (k @ QuatMatrix(u[:, None, :])).data[:, 0, :]
        assert np.allclose(ku, lam * u, atol=1e-9)


def test_qsvd_dominant_rank_one_example():
    nu = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, 0]])
    k = QuatMatrix(quat_outer(nu))
    res = qsvd_dominant(k)
    assert res.lambda1 == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(res.spectrum, [3.0, 0.0, 0.0], atol=1e-12)
    assert (res.u1 ** 2).sum() == pytest.approx(1.0, rel=1e-12)
    recon = res.lambda1 * quat_outer(res.u1)
    assert np.abs(recon - k.data).max() < 1e-9


def test_qsvd_dominant_recovers_scaled_vector():
    rng = np.random.default_rng(43)
    nu = random_quat_array(rng, 8)
    k = QuatMatrix(quat_outer(nu))
    res = qsvd_dominant(k)
    assert res.lambda1 == pytest.approx((nu ** 2).sum(), rel=1e-10)
    assert res.spectrum[1] < 1e-10 * res.lambda1
    # dominant vector spans the same quaternionic line: sqrt(l1) u1 = nu q
    scaled = np.sqrt(res.lambda1) * res.u1
    q = hamilton_product(quat_conj(nu[:1]), scaled[:1]) / (nu[:1] ** 2).sum()
    assert np.allclose(hamilton_product(nu, q), scaled, atol=1e-8)


def test_qsvd_rejects_non_hermitian():
    rng = np.random.default_rng(47)
    with pytest.raises(NotHermitianError):
        qsvd_dominant(QuatMatrix(random_quat_array(rng, 4, 4)))


def test_adjoint_eigenvalue_pairing():
    rng = np.random.default_rng(53)
    k = random_hermitian(rng, 8)
    evals = np.linalg.eigvalsh(to_adjoint(k))
    scale = np.abs(evals).max()
    gaps = np.abs(evals[0::2] - evals[1::2])
    assert gaps.max() / scale < 1e-9
