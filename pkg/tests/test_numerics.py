import numpy as np
import pytest

from bellmax.numerics import DimensionError, hermitian_eig_max, kron, random_unitary, svd
from helpers import random_complex, random_hermitian


def test_pauli_z_top_eigenpair():
    value, vec = hermitian_eig_max(np.diag([1.0, -1.0]))
    assert value == 1.0
    assert np.allclose(vec, [1, 0])


def test_identity_residual():
    value, vec = hermitian_eig_max(np.eye(3))
    assert value == pytest.approx(1.0, abs=1e-14)
    assert np.linalg.norm(np.eye(3) @ vec - vec) < 1e-12
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)


def test_two_by_two_against_characteristic_polynomial(rng):
    for _ in range(200):
        a, b = rng.standard_normal(2)
        c = complex(*rng.standard_normal(2))
        h = np.array([[a, c], [np.conj(c), b]])
        # larger root of l^2 - (a+b) l + (ab - |c|^2)
        expected = ((a + b) + np.sqrt((a + b) ** 2 - 4 * (a * b - abs(c) ** 2))) / 2
        assert hermitian_eig_max(h).value == pytest.approx(expected, abs=1e-12)


def test_rejects_non_hermitian_and_empty():
    with pytest.raises(ValueError):
        hermitian_eig_max(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eig_max(np.zeros((0, 0)))
    with pytest.raises(DimensionError):
        hermitian_eig_max(np.eye(17))


@pytest.mark.parametrize("n", [2, 3, 4, 9, 16])
def test_residual_and_rayleigh_dominance(rng, n):
    h = random_hermitian(rng, n)
    value, vec = hermitian_eig_max(h)
    assert np.linalg.norm(h @ vec - value * vec) <= 1e-10 * np.linalg.norm(h, 2)
    assert abs(np.linalg.norm(vec) - 1) <= 1e-12
    u = random_complex(rng, 1000, n)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    rayleigh = np.einsum("ki,ij,kj->k", u.conj(), h, u).real
    assert rayleigh.max() <= value + 1e-10


def test_deterministic_output(rng):
    h = random_hermitian(rng, 6)
    a = hermitian_eig_max(h)
    b = hermitian_eig_max(h.copy())
    assert a.value == b.value and np.array_equal(a.vector, b.vector)


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    p = np.diag([1.0, 0.0])
    assert np.array_equal(kron(p, p), np.diag([1.0, 0, 0, 0]))


def test_kron_sigma_y_entrywise():
    sy = np.array([[0, -1j], [1j, 0]])
    expected = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    expected[2 * i + k, 2 * j + l] = sy[i, j] * sy[k, l]
    out = kron(sy, sy)
    assert np.array_equal(out, expected)
    assert out[0, 3] == -1 and out[3, 0] == -1 and out[1, 2] == 1 and out[2, 1] == 1


def test_kron_size_limit():
    with pytest.raises(DimensionError):
        kron(np.eye(4), np.eye(5), max_dim=16)


def test_kron_mixed_product_and_bilinearity(rng):
    for _ in range(50):
        a, b, c, d = (random_complex(rng, 2, 2) for _ in range(4))
        assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12, rtol=0)
        lam = rng.standard_normal()
        assert np.allclose(kron(a + lam * c, b), kron(a, b) + lam * kron(c, b), atol=1e-12, rtol=0)


def test_svd_examples():
    _, s, _ = svd(np.diag([3.0, 2.0]))
    assert np.allclose(s, [3, 2])
    _, s, _ = svd(np.zeros((3, 3)))
    assert np.all(s == 0)
    alpha = 0.9
    beta = np.sqrt(1 - alpha**2)
    _, s, _ = svd(np.diag([alpha, alpha, beta, beta]) / np.sqrt(2))
    assert np.allclose(s, [alpha / np.sqrt(2)] * 2 + [beta / np.sqrt(2)] * 2, atol=1e-14)


@pytest.mark.parametrize("shape", [(2, 2), (3, 5), (4, 4), (16, 16)])
def test_svd_reconstruction_and_unitary_invariance(rng, shape):
    m = random_complex(rng, *shape)
    u, s, w = svd(m)
    k = len(s)
    assert np.all(np.diff(s) <= 0)
    assert np.linalg.norm(u[:, :k] @ np.diag(s) @ w[:, :k].conj().T - m) <= 1e-10 * np.linalg.norm(m, 2)
    left, right = random_unitary(shape[0], rng), random_unitary(shape[1], rng)
    _, s2, _ = svd(left @ m @ right)
    assert np.allclose(s, s2, atol=1e-10, rtol=0)
