"""Outcome-1 projectors built from angle/phase charts with local gauge fixing.

Each party's nondegenerate settings are numbered 0, 1, 2, ... in declaration
order (degenerate settings are skipped). Local basis freedom fixes setting 0
completely and reduces the parameters of the next ones:

    dim 2, rank 1:  0 params | 1 | 2 (Bloch angles)
    dim 3, rank 1/2: 0 | 1 | 3 | 4
    dim 4, rank 2:  0 | 2 | 8

A real-field chart is the complex chart with every phase fixed at zero, so it
takes only the angle parameters.
"""
from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass

import numpy as np


class Field(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


class ShapeError(ValueError):
    """Unsupported (field, dimension, rank) combination or bad parameter slice."""


@dataclass(frozen=True)
class SettingKind:
    label: str  # "zero", "one" or "projective"
    rank: int = 0

    @property
    def degenerate(self) -> bool:
        return self.label != "projective"

    def __str__(self) -> str:
        return f"P{self.rank}" if self.label == "projective" else self.label


ZERO = SettingKind("zero")
ONE = SettingKind("one")


def projective(rank: int) -> SettingKind:
    return SettingKind("projective", int(rank))


def parse_kind(text: str) -> SettingKind:
    if text in ("zero", "one"):
        return SettingKind(text)
    if text.startswith("P") and text[1:].isdigit():
        return projective(int(text[1:]))
    raise ShapeError(f"unknown setting kind {text!r}")


@dataclass(frozen=True)
class ScenarioShape:
    field: Field
    dim_A: int
    dim_B: int
    kinds_A: tuple[SettingKind, ...]
    kinds_B: tuple[SettingKind, ...]

    def __post_init__(self):
        object.__setattr__(self, "field", Field(self.field))
        object.__setattr__(self, "kinds_A", tuple(self.kinds_A))
        object.__setattr__(self, "kinds_B", tuple(self.kinds_B))
        for dim, kinds in ((self.dim_A, self.kinds_A), (self.dim_B, self.kinds_B)):
            for k in kinds:
                if not k.degenerate and not 1 <= k.rank < dim:
                    raise ShapeError(f"rank {k.rank} invalid in dimension {dim}")

    @property
    def n_degenerate(self) -> int:
        return sum(k.degenerate for k in self.kinds_A + self.kinds_B)

    def party(self, which: str) -> tuple[int, tuple[SettingKind, ...]]:
        return (self.dim_A, self.kinds_A) if which == "A" else (self.dim_B, self.kinds_B)

    def to_dict(self) -> dict:
        return {
            "field": self.field.value,
            "dim_A": self.dim_A,
            "dim_B": self.dim_B,
            "kinds_A": [str(k) for k in self.kinds_A],
            "kinds_B": [str(k) for k in self.kinds_B],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioShape":
        return cls(
            Field(doc["field"]),
            int(doc["dim_A"]),
            int(doc["dim_B"]),
            tuple(parse_kind(k) for k in doc["kinds_A"]),
            tuple(parse_kind(k) for k in doc["kinds_B"]),
        )


# ---------------------------------------------------------------------------
# charts: (names of parameters, flags marking which of them are phases)

def _chart(dim: int, rank: int, position: int) -> tuple[bool, ...]:
    """Phase flags of the chart used at a gauge position; length = complex count."""
    if dim == 2 and rank == 1:
        return ((), (False,), (False, True))[min(position, 2)]
    if dim == 3 and rank in (1, 2):
        # (theta, phi, alpha, beta) for (cos phi sin theta e^ia, sin phi sin theta e^ib, cos theta)
        return ((), (False,), (False, False, True), (False, False, True, True))[min(position, 3)]
    if dim == 4 and rank == 2:
        # (phi, psi, gamma1, gamma2, beta1, beta2, delta2, chi)
        return ((), (False, False), (False,) * 4 + (True,) * 4)[min(position, 2)]
    raise ShapeError(f"no chart for rank-{rank} projectors in dimension {dim}")


@functools.lru_cache(maxsize=None)
def _angle_slots(dim: int, rank: int, position: int) -> tuple[int, np.ndarray]:
    phases = _chart(dim, rank, position)
    return len(phases), np.array([i for i, p in enumerate(phases) if not p], dtype=int)


def setting_param_count(field: Field, dim: int, kind: SettingKind, position: int) -> int:
    if kind.degenerate:
        return 0
    total, angles = _angle_slots(dim, kind.rank, position)
    return total if field is Field.COMPLEX or field == "complex" else len(angles)


def validate_shape(shape: ScenarioShape) -> None:
    for dim, kinds in (shape.party("A"), shape.party("B")):
        if dim not in (2, 3, 4):
            raise ShapeError(f"unsupported local dimension {dim}")
        for k in kinds:
            if not k.degenerate:
                _chart(dim, k.rank, 0)


def parameter_count(shape: ScenarioShape) -> int:
    return setting_layout(shape)[1]


def _expand(field: Field, dim: int, kind: SettingKind, position: int, params) -> np.ndarray:
    """Complex-chart parameter vector with phases set to zero for the real field."""
    total, angles = _angle_slots(dim, kind.rank, position)
    params = np.asarray(params, dtype=float).reshape(-1)
    complex_field = field is Field.COMPLEX
    expected = total if complex_field else len(angles)
    if params.size != expected:
        raise ShapeError(
            f"{field.value} dim-{dim} {kind} at gauge position {position} takes {expected} "
            f"parameters, got {params.size}"
        )
    if complex_field:
        return params
    full = np.zeros(total)
    full[angles] = params
    return full


def _rank_one(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _qubit(position: int, p: np.ndarray) -> np.ndarray:
    if position == 0:
        return np.diag([1.0, 0.0]).astype(complex)
    if position == 1:
        t = p[0]
        return _rank_one(np.array([np.sin(t), np.cos(t)], dtype=complex))
    theta, phi = p
    return _rank_one(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))


def qutrit_vector(theta, phi=0.0, alpha=0.0, beta=0.0) -> np.ndarray:
    return np.array([
        np.cos(phi) * np.sin(theta) * np.exp(1j * alpha),
        np.sin(phi) * np.sin(theta) * np.exp(1j * beta),
        np.cos(theta),
    ])


def _qutrit(rank: int, position: int, p: np.ndarray) -> np.ndarray:
    if position == 0:
        v = np.array([0.0, 0.0, 1.0], dtype=complex)
    elif position == 1:
        v = np.array([np.sin(p[0]), 0.0, np.cos(p[0])], dtype=complex)
    elif position == 2:
        v = qutrit_vector(p[0], p[1], p[2], 0.0)
    else:
        v = qutrit_vector(*p)
    m = _rank_one(v)
    return m if rank == 1 else np.eye(3) - m


def principal_angle_projector(phi, psi) -> np.ndarray:
    """(1 + H)/2 for the two-angle canonical rank-2 projector in dimension 4."""
    c1, s1, c2, s2 = np.cos(phi), np.sin(phi), np.cos(psi), np.sin(psi)
    h = np.array([
        [c1, 0, s1, 0],
        [0, c2, 0, s2],
        [s1, 0, -c1, 0],
        [0, s2, 0, -c2],
    ], dtype=complex)
    return (np.eye(4) + h) / 2


def su2(gamma, beta=0.0, delta=0.0) -> np.ndarray:
    return np.array([
        [np.exp(1j * beta) * np.cos(gamma), np.exp(1j * delta) * np.sin(gamma)],
        [-np.exp(-1j * delta) * np.sin(gamma), np.exp(-1j * beta) * np.cos(gamma)],
    ])


def block_unitary(gamma1, gamma2, beta1=0.0, beta2=0.0, delta2=0.0, chi=0.0) -> np.ndarray:
    """u12 (+) e^{i chi} u34; the delta phase of u12 is absorbed by the stabiliser."""
    u = np.zeros((4, 4), dtype=complex)
    u[:2, :2] = su2(gamma1, beta1, 0.0)
    u[2:, 2:] = np.exp(1j * chi) * su2(gamma2, beta2, delta2)
    return u


def _ququart(position: int, p: np.ndarray) -> np.ndarray:
    if position == 0:
        return np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    if position == 1:
        return principal_angle_projector(p[0], p[1])
    phi, psi, g1, g2, b1, b2, d2, chi = p
    u = block_unitary(g1, g2, b1, b2, d2, chi)
    return u @ principal_angle_projector(phi, psi) @ u.conj().T


def build_projector(field: Field, dim: int, kind: SettingKind, params=(), position: int = 0) -> np.ndarray:
    """Outcome-1 projector for one setting at the given gauge position."""
    field = Field(field)
    if kind.degenerate:
        if dim < 1:
            raise ShapeError(f"invalid dimension {dim}")
        return np.eye(dim, dtype=complex) if kind == ONE else np.zeros((dim, dim), dtype=complex)
    if kind == ZERO:
        return np.zeros((dim, dim), dtype=complex)
    if kind == ONE:
        return np.eye(dim, dtype=complex)
    p = _expand(field, dim, kind, position, params)
    if dim == 2:
        return _qubit(position, p)
    if dim == 3:
        return _qutrit(kind.rank, position, p)
    return _ququart(position, p)


@functools.lru_cache(maxsize=4096)
def setting_layout(shape: ScenarioShape):
    """Per-setting (party, dim, kind, position, offset, count) for a shape."""
    validate_shape(shape)
    entries = []
    offset = 0
    for party, (dim, kinds) in enumerate((shape.party("A"), shape.party("B"))):
        position = 0
        for k in kinds:
            if k.degenerate:
                entries.append((party, dim, k, 0, offset, 0))
                continue
            n = setting_param_count(shape.field, dim, k, position)
            entries.append((party, dim, k, position, offset, n))
            offset += n
            position += 1
    return tuple(entries), offset


def build_scenario(shape: ScenarioShape, params) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Projector lists for Alice and Bob from one flat parameter vector."""
    params = np.asarray(params, dtype=float).reshape(-1)
    entries, expected = setting_layout(shape)
    if params.size != expected:
        raise ShapeError(f"shape takes {expected} parameters, got {params.size}")
    out = ([], [])
    for party, dim, k, position, offset, n in entries:
        out[party].append(build_projector(shape.field, dim, k, params[offset:offset + n], position))
    return out[0], out[1]


def bloch_angles(projector) -> tuple[float, float]:
    """Invert the qubit chart at gauge position >= 2: (theta, phi) of a rank-1 projector."""
    p = np.asarray(projector)
    x = 2 * p[1, 0].real
    y = 2 * p[1, 0].imag
    z = (p[0, 0] - p[1, 1]).real
    return float(np.arctan2(np.hypot(x, y), z)), float(np.arctan2(y, x))


def enumerate_kind_combinations(dim: int, m_A: int, m_B: int, allow_degenerate: bool = False):
    """All per-setting kind assignments the optimiser scans for a local dimension.

    Qubits: rank 1, plus zero/one when degeneracy is allowed. Qutrits: rank 1 or
    2 per setting. Ququarts: rank 2 only. Returns a list of (kinds_A, kinds_B).
    """
    if allow_degenerate and dim != 2:
        raise ShapeError("degenerate settings are only enumerated for qubits")
    if dim == 2:
        options = (projective(1), ZERO, ONE) if allow_degenerate else (projective(1),)
    elif dim == 3:
        options = (projective(1), projective(2))
    elif dim == 4:
        options = (projective(2),)
    else:
        raise ShapeError(f"unsupported local dimension {dim}")
    return [
        (combo[:m_A], combo[m_A:])
        for combo in itertools.product(options, repeat=m_A + m_B)
    ]


def complexify(shape: ScenarioShape, params) -> tuple[ScenarioShape, np.ndarray]:
    """The complex-field shape and parameters (phases zero) equivalent to a real-field point."""
    params = np.asarray(params, dtype=float).reshape(-1)
    if shape.field is Field.COMPLEX:
        return shape, params.copy()
    target = ScenarioShape(Field.COMPLEX, shape.dim_A, shape.dim_B, shape.kinds_A, shape.kinds_B)
    entries, _ = setting_layout(shape)
    pieces = []
    for _, dim, kind, position, offset, n in entries:
        if not kind.degenerate:
            pieces.append(_expand(Field.REAL, dim, kind, position, params[offset:offset + n]))
    return target, np.concatenate(pieces) if pieces else np.zeros(0)
