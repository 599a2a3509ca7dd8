"""Two-outcome bipartite Bell inequalities in Collins-Gisin form.

The Bell expression is

    constant + sum_ij joint[i, j] p(A_i=1, B_j=1)
             + sum_i marg_A[i] p(A_i=1) + sum_j marg_B[j] p(B_j=1)

and the inequality states that it does not exceed ``classical_bound``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

MAX_ENUMERATION_SETTINGS = 24
BOUND_TOL = 1e-9
BUNDLED = ("chsh", "i3322")


class InequalityError(ValueError):
    """Malformed or inconsistent inequality data."""


@dataclass(frozen=True, eq=False)
class BellInequality:
    name: str
    joint: np.ndarray
    marg_A: np.ndarray
    marg_B: np.ndarray
    constant: float = 0.0
    classical_bound: float = field(default=math.nan)
    type_tag: str = ""

    def __post_init__(self):
        joint = np.array(self.joint, dtype=float)
        if joint.ndim != 2:
            raise InequalityError("joint must be a matrix")
        marg_A = np.array(self.marg_A, dtype=float).reshape(-1)
        marg_B = np.array(self.marg_B, dtype=float).reshape(-1)
        m_A, m_B = joint.shape
        if marg_A.size != m_A or marg_B.size != m_B:
            raise InequalityError(
                f"marginal lengths ({marg_A.size}, {marg_B.size}) do not match joint shape {joint.shape}"
            )
        expected_tag = f"{m_A}{m_B}22"
        tag = self.type_tag or expected_tag
        if tag != expected_tag:
            raise InequalityError(f"type {tag!r} inconsistent with joint shape {joint.shape}")
        for arr in (joint, marg_A, marg_B):
            arr.setflags(write=False)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "marg_A", marg_A)
        object.__setattr__(self, "marg_B", marg_B)
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "type_tag", tag)
        if math.isnan(self.classical_bound):
            object.__setattr__(self, "classical_bound", classical_bound(self))

    @property
    def m_A(self) -> int:
        return self.joint.shape[0]

    @property
    def m_B(self) -> int:
        return self.joint.shape[1]

    def transposed(self) -> "BellInequality":
        """The same inequality with Alice and Bob exchanged."""
        return BellInequality(
            name=self.name + "^T",
            joint=self.joint.T,
            marg_A=self.marg_B,
            marg_B=self.marg_A,
            constant=self.constant,
        )

    def value(self, a, b) -> float:
        """Bell expression for a deterministic strategy (outcome-1 bits)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return float(self.constant + a @ self.joint @ b + self.marg_A @ a + self.marg_B @ b)

    def digest(self) -> str:
        return hashlib.sha256(save(self)).hexdigest()[:16]


def _bit_patterns(m: int) -> np.ndarray:
    # row k holds the bits of k, most significant first: lexicographic order
    idx = np.arange(2**m)[:, None]
    return ((idx >> np.arange(m - 1, -1, -1)) & 1).astype(float)


def classical_bound(ineq: BellInequality) -> float:
    """Maximum of the Bell expression over all 2^(m_A+m_B) deterministic strategies."""
    m_A, m_B = ineq.joint.shape
    if m_A + m_B > MAX_ENUMERATION_SETTINGS:
        raise InequalityError(
            f"enumeration of 2^{m_A + m_B} strategies exceeds the limit 2^{MAX_ENUMERATION_SETTINGS}"
        )
    bits_B = _bit_patterns(m_B)
    bob_terms = bits_B @ ineq.marg_B
    best = -math.inf
    chunk = max(1, 2**20 // (2**m_B))
    bits_A = _bit_patterns(m_A)
    for start in range(0, len(bits_A), chunk):
        a = bits_A[start:start + chunk]
        vals = (a @ ineq.joint) @ bits_B.T + (a @ ineq.marg_A)[:, None] + bob_terms[None, :]
        best = max(best, float(vals.max()))
    return ineq.constant + best


def violation_of(ineq: BellInequality, quantum_value: float) -> float:
    return quantum_value - ineq.classical_bound


def to_dict(ineq: BellInequality) -> dict:
    return {
        "name": ineq.name,
        "type": ineq.type_tag,
        "constant": ineq.constant,
        "marg_A": ineq.marg_A.tolist(),
        "marg_B": ineq.marg_B.tolist(),
        "joint": ineq.joint.tolist(),
        "classical_bound": ineq.classical_bound,
    }


def from_dict(doc: dict) -> BellInequality:
    keys = ("name", "type", "constant", "marg_A", "marg_B", "joint", "classical_bound")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise InequalityError(f"missing keys: {', '.join(missing)}")
    try:
        joint = np.array(doc["joint"], dtype=float)
        stored = float(doc["classical_bound"])
    except (TypeError, ValueError) as exc:
        raise InequalityError(f"non-numeric coefficient data: {exc}") from None
    if joint.ndim != 2:
        raise InequalityError("joint must be an array of equal-length arrays")
    ineq = BellInequality(
        name=str(doc["name"]),
        joint=joint,
        marg_A=doc["marg_A"],
        marg_B=doc["marg_B"],
        constant=doc["constant"],
        type_tag=str(doc["type"]),
    )
    if not math.isclose(ineq.classical_bound, stored, rel_tol=0.0, abs_tol=BOUND_TOL):
        raise InequalityError(
            f"{ineq.name}: stored classical bound {stored} differs from enumerated {ineq.classical_bound}"
        )
    return ineq


def load(data: bytes | str) -> BellInequality:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InequalityError(f"malformed inequality document: {exc}") from None
    if not isinstance(doc, dict):
        raise InequalityError("inequality document must be a JSON object")
    return from_dict(doc)


def save(ineq: BellInequality) -> bytes:
    return (json.dumps(to_dict(ineq), indent=2) + "\n").encode("utf-8")


def load_file(path: str | Path) -> BellInequality:
    return load(Path(path).read_bytes())


def bundled(name: str) -> BellInequality:
    """Load one of the inequalities shipped with the package (``chsh``, ``i3322``)."""
    key = name.lower().removesuffix(".json")
    if key not in BUNDLED:
        raise KeyError(f"no bundled inequality {name!r}; available: {', '.join(BUNDLED)}")
    return load(resources.files("bellmax.data").joinpath(f"{key}.json").read_bytes())


def bundled_dir() -> Path:
    return Path(str(resources.files("bellmax.data")))
