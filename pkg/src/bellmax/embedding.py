"""Complex n-dimensional measurements and states as real 2n-dimensional ones.

A complex entry a + ib becomes the real 2x2 block [[a, -b], [b, a]]. Operators
on each party are mapped entry-wise; a bipartite state, stored as its n x n
coefficient matrix V (|V> = sum V_ij |i>|j>), is mapped by the same block rule
applied to V and rescaled by 1/sqrt(2). Bob's operators are mapped from their
complex conjugates so that

    Tr(A V B^T V^dag) = Tr(A' V' B'^T V'^dag).
"""
from __future__ import annotations

import numpy as np

from .belloperator import expectation
from .inequality import BellInequality, violation_of
from .measurements import Field, ScenarioShape, projective
from .optimizer import ViolationResult

NORM_TOL = 1e-10


def map_matrix(m) -> np.ndarray:
    """Replace each complex entry by its 2x2 real block."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    rows, cols = m.shape
    out = np.empty((2 * rows, 2 * cols))
    out[0::2, 0::2] = m.real
    out[0::2, 1::2] = -m.imag
    out[1::2, 0::2] = m.imag
    out[1::2, 1::2] = m.real
    return out


def map_vector(v) -> np.ndarray:
    """Component rule for vectors: v_i -> (Re v_i, Im v_i)."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    out = np.empty(2 * v.size)
    out[0::2] = v.real
    out[1::2] = v.imag
    return out


def coefficient_matrix(state, dim_A: int, dim_B: int) -> np.ndarray:
    state = np.asarray(state, dtype=complex).reshape(-1)
    if state.size != dim_A * dim_B:
        raise ValueError(f"state of length {state.size} does not match {dim_A}x{dim_B}")
    return state.reshape(dim_A, dim_B)


def map_state(v) -> np.ndarray:
    """Coefficient matrix of the real image state: map_matrix(V) / sqrt(2)."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2:
        raise ValueError("states are passed as coefficient matrices")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalised (norm {norm:.12g})")
    return map_matrix(v) / np.sqrt(2)


def map_alice(a) -> np.ndarray:
    return map_matrix(a)


def map_bob(b) -> np.ndarray:
    return map_matrix(np.conj(b))


def bilinear_expectation(a, v, b) -> float:
    """Tr(A V B^T V^dag): <V| A (x) B |V> for a coefficient matrix V."""
    a, v, b = (np.asarray(x, dtype=complex) for x in (a, v, b))
    if a.shape[0] != v.shape[0] or b.shape[0] != v.shape[1]:
        raise ValueError(f"shapes {a.shape}, {v.shape}, {b.shape} do not fit together")
    return float(np.trace(a @ v @ b.T @ v.conj().T).real)


def verify_expectation(v, p_a, p_b) -> tuple[float, float, float]:
    """Complex-side and real-side expectations of P_a (x) P_b and their difference."""
    v = np.asarray(v, dtype=complex)
    lhs = bilinear_expectation(p_a, v, p_b)
    rhs = bilinear_expectation(map_alice(p_a), map_state(v), map_bob(p_b))
    return lhs, rhs, abs(lhs - rhs)


def _doubled_kinds(kinds):
    return tuple(k if k.degenerate else projective(2 * k.rank) for k in kinds)


def embed_scenario(ineq: BellInequality, solution):
    """Real certificate in dimension 2n reproducing a (complex) solution's value.

    The certificate is evaluated directly on the mapped state; it carries no
    chart parameters.
    """
    shape = solution.shape
    v = coefficient_matrix(solution.state, shape.dim_A, shape.dim_B)
    state = map_state(v).reshape(-1)
    projs_A = [map_alice(p) for p in solution.projectors_A]
    projs_B = [map_bob(p) for p in solution.projectors_B]
    value = expectation(ineq, projs_A, projs_B, state)
    target = ScenarioShape(
        Field.REAL,
        2 * shape.dim_A,
        2 * shape.dim_B,
        _doubled_kinds(shape.kinds_A),
        _doubled_kinds(shape.kinds_B),
    )
    return ViolationResult(
        value=value,
        violation=violation_of(ineq, value),
        shape=target,
        params=None,
        projectors_A=projs_A,
        projectors_B=projs_B,
        state=state.astype(complex),
        combination_index=solution.combination_index,
    )


def lift_qubit_solution(ineq: BellInequality, solution):
    """Rank-2 ququart measurements reproducing a qubit solution, degenerate settings included.

    Each local space becomes qubit (x) ancilla with the state on ancilla |0>.
    A rank-1 projector P becomes P (x) I; the identity setting becomes
    I (x) |0><0| (the state's support) and the zero setting I (x) |1><1|.
    """
    shape = solution.shape
    if shape.dim_A != 2 or shape.dim_B != 2:
        raise ValueError("only qubit solutions can be lifted")
    keep, drop = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])

    def lift(p, kind):
        if kind.label == "one":
            return np.kron(np.eye(2), keep).astype(complex)
        if kind.label == "zero":
            return np.kron(np.eye(2), drop).astype(complex)
        return np.kron(p, np.eye(2))

    projs_A = [lift(p, k) for p, k in zip(solution.projectors_A, shape.kinds_A)]
    projs_B = [lift(p, k) for p, k in zip(solution.projectors_B, shape.kinds_B)]
    # isometry qubit -> qubit (x) |0>
    iso = np.kron(np.eye(2), np.array([[1.0], [0.0]]))
    v = coefficient_matrix(solution.state, 2, 2)
    state = (iso @ v @ iso.T).reshape(-1)
    value = expectation(ineq, projs_A, projs_B, state)
    target = ScenarioShape(
        shape.field, 4, 4,
        (projective(2),) * len(shape.kinds_A),
        (projective(2),) * len(shape.kinds_B),
    )
    return ViolationResult(
        value=value,
        violation=violation_of(ineq, value),
        shape=target,
        params=None,
        projectors_A=projs_A,
        projectors_B=projs_B,
        state=state,
        combination_index=solution.combination_index,
    )
