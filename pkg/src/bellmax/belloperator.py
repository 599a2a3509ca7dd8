"""Bell operator for fixed measurements and its quantum value."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .inequality import BellInequality
from .numerics import MAX_DIM, DimensionError, hermitian_eig_max


@dataclass(frozen=True, eq=False)
class BellOperator:
    matrix: np.ndarray
    inequality: BellInequality
    projs_A: tuple
    projs_B: tuple


def _check(ineq: BellInequality, projs_A, projs_B) -> tuple[int, int]:
    if len(projs_A) != ineq.m_A or len(projs_B) != ineq.m_B:
        raise ValueError(
            f"{ineq.name} needs {ineq.m_A}+{ineq.m_B} projectors, got {len(projs_A)}+{len(projs_B)}"
        )
    dims = []
    for projs in (projs_A, projs_B):
        shapes = {np.shape(p) for p in projs}
        if len(shapes) != 1:
            raise ValueError(f"projectors of one party have mixed shapes {sorted(shapes)}")
        (shape,) = shapes
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"projector shape {shape} is not square")
        dims.append(shape[0])
    return dims[0], dims[1]


def bell_matrix(ineq: BellInequality, projs_A, projs_B) -> np.ndarray:
    """sum_ij c_ij A_i(x)B_j + sum_i a_i A_i(x)I + sum_j b_j I(x)B_j + const I(x)I."""
    _check(ineq, projs_A, projs_B)
    return stacked_bell_matrix(ineq, np.asarray(projs_A, dtype=complex), np.asarray(projs_B, dtype=complex))


def stacked_bell_matrix(ineq: BellInequality, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Bell matrix from projector stacks of shape (m_A, d_A, d_A) and (m_B, d_B, d_B)."""
    dim_A, dim_B = A.shape[1], B.shape[1]
    eye_B = np.eye(dim_B)
    # Bob operator multiplying each A_i, and the Bob-only part multiplying I
    flat_B = B.reshape(len(B), -1)
    bob_for_A = (ineq.joint @ flat_B).reshape(-1, dim_B, dim_B) + ineq.marg_A[:, None, None] * eye_B
    bob_alone = (ineq.marg_B @ flat_B).reshape(dim_B, dim_B) + ineq.constant * eye_B
    h = np.einsum("iab,icd->acbd", A, bob_for_A) + np.einsum("ab,cd->acbd", np.eye(dim_A), bob_alone)
    return h.reshape(dim_A * dim_B, dim_A * dim_B)


def top_eigenvalue(h: np.ndarray) -> float:
    """Largest eigenvalue without validation; real symmetric input takes the real solver."""
    if not h.imag.any():
        return float(np.linalg.eigvalsh(h.real)[-1])
    return float(np.linalg.eigvalsh(h)[-1])


def assemble(ineq: BellInequality, projs_A, projs_B) -> BellOperator:
    h = bell_matrix(ineq, projs_A, projs_B)
    return BellOperator(h, ineq, tuple(projs_A), tuple(projs_B))


def quantum_value(ineq: BellInequality, projs_A, projs_B) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of the Bell operator and its eigenvector."""
    h = bell_matrix(ineq, projs_A, projs_B)
    if h.shape[0] > MAX_DIM:
        raise DimensionError(f"Bell operator of dimension {h.shape[0]} exceeds {MAX_DIM}")
    pair = hermitian_eig_max(h)
    return pair.value, pair.vector


def expectation(ineq: BellInequality, projs_A, projs_B, state) -> float:
    """<state| H |state> without any dimension limit."""
    h = bell_matrix(ineq, projs_A, projs_B)
    psi = np.asarray(state, dtype=complex).reshape(-1)
    return float(np.real(psi.conj() @ h @ psi))


def max_eigenvalue(ineq: BellInequality, projs_A, projs_B) -> float:
    """Objective fast path: no Hermiticity check, eigenvalues only."""
    return top_eigenvalue(bell_matrix(ineq, projs_A, projs_B))
