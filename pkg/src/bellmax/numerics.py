"""Small dense linear algebra helpers (dimension <= 16 in the optimiser).

All matrices are numpy arrays of dtype complex128; real-field data is carried
in the same dtype with zero imaginary parts so both fields share one code path.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

MAX_DIM = 16
HERMITIAN_TOL = 1e-12


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


class DimensionError(ValueError):
    """Raised when a matrix exceeds the supported size."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or 0 in a.shape:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and hermiticity_defect(a) <= tol


def hermitian_eig_max(h, max_dim: int = MAX_DIM) -> EigenPair:
    """Largest eigenvalue of a Hermitian matrix and a unit eigenvector for it."""
    h = as_matrix(h)
    n = h.shape[0]
    if h.shape[1] != n:
        raise ValueError(f"matrix is not square: {h.shape}")
    if n > max_dim:
        raise DimensionError(f"dimension {n} exceeds {max_dim}")
    if hermiticity_defect(h) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within 1e-12")
    w, v = np.linalg.eigh(h)
    vec = v[:, -1]
    # fix the phase so the output is reproducible: largest component real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    return EigenPair(float(w[-1]), vec / np.linalg.norm(vec))


def kron(a, b, max_dim: int | None = None) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if max_dim is not None:
        rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
        if max(rows, cols) > max_dim:
            raise DimensionError(f"tensor product of size {rows}x{cols} exceeds {max_dim}")
    return np.kron(a, b)


def svd(m, max_dim: int = MAX_DIM) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, s, W)`` with ``m = U @ diag(s) @ W^†`` and ``s`` descending."""
    m = as_matrix(m)
    if max(m.shape) > max_dim:
        raise DimensionError(f"matrix of shape {m.shape} exceeds {max_dim}")
    u, s, vh = np.linalg.svd(m)
    return u, s, vh.conj().T


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
