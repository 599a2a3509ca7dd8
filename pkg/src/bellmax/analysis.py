"""Schmidt analysis of optimal states and effectively degenerate measurements."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import svd

RANK_TOL = 1e-7
DEGENERACY_TOL = 1e-6
ENTANGLEMENT_TOL = 1e-4

IDENTITY = "acts_as_identity"
ZERO = "acts_as_zero"
GENUINE = "genuine"


@dataclass
class SchmidtReport:
    coefficients: np.ndarray
    effective_rank: int
    basis_A: np.ndarray  # columns: Alice's Schmidt vectors
    basis_B: np.ndarray
    is_maximally_entangled: bool = False
    verdicts_A: list = field(default_factory=list)
    verdicts_B: list = field(default_factory=list)

    def support_projector(self, party: str) -> np.ndarray:
        basis = self.basis_A if party == "A" else self.basis_B
        vecs = basis[:, : self.effective_rank]
        return vecs @ vecs.conj().T

    def reconstruct(self) -> np.ndarray:
        k = len(self.coefficients)
        return np.einsum("k,ak,bk->ab", self.coefficients, self.basis_A[:, :k], self.basis_B[:, :k]).reshape(-1)


def schmidt(state, dim_A: int, dim_B: int, rank_tol: float = RANK_TOL) -> SchmidtReport:
    """Schmidt decomposition via the SVD of the coefficient matrix (row index = Alice)."""
    psi = np.asarray(state, dtype=complex).reshape(-1)
    if psi.size != dim_A * dim_B:
        raise ValueError(f"state of length {psi.size} does not match {dim_A}x{dim_B}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state is not normalised (norm {norm:.12g})")
    u, s, w = svd(psi.reshape(dim_A, dim_B), max_dim=max(16, dim_A, dim_B))
    rank = int(np.sum(s > rank_tol))
    report = SchmidtReport(s, rank, u, w.conj())
    report.is_maximally_entangled = flag_maximal_entanglement(report)
    return report


def flag_maximal_entanglement(report: SchmidtReport, tol: float = ENTANGLEMENT_TOL) -> bool:
    """Equal Schmidt coefficients on the support of the state (at least two terms)."""
    support = report.coefficients[: report.effective_rank]
    if len(support) < 2:
        return False
    return bool(support.max() - support.min() <= tol)


def setting_verdict(projector, support: np.ndarray, tol: float = DEGENERACY_TOL) -> str:
    p = np.asarray(projector, dtype=complex)
    if np.linalg.norm(p @ support - support, 2) <= tol:
        return IDENTITY
    if np.linalg.norm(p @ support, 2) <= tol:
        return ZERO
    return GENUINE


def detect_effective_degeneracy(result, tol: float = DEGENERACY_TOL, report: SchmidtReport | None = None):
    """Per-setting verdicts for Alice and Bob on the support of the optimal state."""
    if report is None:
        report = schmidt(result.state, result.shape.dim_A, result.shape.dim_B)
    pi_A = report.support_projector("A")
    pi_B = report.support_projector("B")
    verdicts_A = [setting_verdict(p, pi_A, tol) for p in result.projectors_A]
    verdicts_B = [setting_verdict(p, pi_B, tol) for p in result.projectors_B]
    return verdicts_A, verdicts_B


def analyze(result, tol: float = DEGENERACY_TOL, entanglement_tol: float = ENTANGLEMENT_TOL) -> SchmidtReport:
    report = schmidt(result.state, result.shape.dim_A, result.shape.dim_B)
    report.is_maximally_entangled = flag_maximal_entanglement(report, entanglement_tol)
    report.verdicts_A, report.verdicts_B = detect_effective_degeneracy(result, tol, report)
    return report
