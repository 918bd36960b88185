"""Dense linear algebra for one to three qubits.

Basis ordering is big-endian: qubit 0 is the most significant bit of the
basis index, so ``|q0 q1 q2>`` sits at index ``4*q0 + 2*q1 + q2``.
Qubit indices in every public function are 0-based under this convention.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

TOL = 1e-12
PSD_SLACK = 1e-10
MAX_QUBITS = 3

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (I2, PAULI_X, PAULI_Y, PAULI_Z):
    _m.setflags(write=False)


class InvariantError(ValueError):
    """A value violates one of its type invariants."""


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


class CapacityError(ValueError):
    """The result would exceed the supported qubit count."""


class Sign(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    @property
    def opposite(self) -> "Sign":
        return Sign(-int(self))


SignLike = Union[Sign, int, str]


def as_sign(sign: SignLike) -> Sign:
    if isinstance(sign, str):
        try:
            return {"plus": Sign.PLUS, "+": Sign.PLUS, "minus": Sign.MINUS, "-": Sign.MINUS}[sign.lower()]
        except KeyError:
            raise ValueError(f"unknown sign {sign!r}") from None
    return Sign(int(sign))


def _owned(arr: np.ndarray) -> np.ndarray:
    """Freeze a freshly computed complex vector in place, skipping the defensive copy."""
    arr.setflags(write=False)
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized ket on 1-3 qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = self.amplitudes
        if not (isinstance(amps, np.ndarray) and amps.dtype == complex and amps.ndim == 1 and not amps.flags.writeable):
            amps = _readonly(np.ravel(amps))
        n = amps.size
        if n not in (2, 4, 8):
            raise DimensionError(f"amplitude vector length {n} is not 2, 4 or 8")
        norm2 = np.vdot(amps, amps).real
        # a NaN or inf amplitude makes norm2 non-finite
        if not math.isfinite(norm2):
            raise InvariantError("amplitudes must be finite")
        if abs(norm2 - 1.0) > TOL:
            raise InvariantError(f"state not normalized: sum |a|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = math.sqrt(np.vdot(amps, amps).real)
        if not math.isfinite(norm) or norm < 1e-300:
            raise InvariantError("cannot normalize a zero or non-finite vector")
        return cls(_owned(amps / norm))

    @property
    def num_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def allclose(self, other: "PureState", atol: float = TOL) -> bool:
        """Exact amplitude comparison, global phase included."""
        return self.dim == other.dim and np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0)

    def __repr__(self):
        return f"PureState({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator of dimension 2 or 4."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = _readonly(self.matrix)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
            raise DimensionError(f"density matrix must be 2x2 or 4x4, got shape {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise InvariantError("density matrix entries must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > TOL:
            raise InvariantError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TOL:
            raise InvariantError(f"density matrix trace {np.trace(rho)!r} != 1")
        if np.linalg.eigvalsh(rho).min() < -PSD_SLACK:
            raise InvariantError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int = 2) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.matrix, precision=6)})"


@dataclass(frozen=True)
class UnitAxis:
    """Direction on the unit sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        v = (self.x, self.y, self.z)
        if not all(np.isfinite(v)):
            raise InvariantError("axis components must be finite")
        if abs(self.x * self.x + self.y * self.y + self.z * self.z - 1.0) > TOL:
            raise InvariantError(f"axis {v} is not unit norm")

    @classmethod
    def from_vector(cls, v) -> "UnitAxis":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if v.shape != (3,) or not np.isfinite(norm) or norm == 0:
            raise InvariantError(f"cannot build a unit axis from {v!r}")
        v = v / norm
        return cls(*v)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "UnitAxis":
        """Polar angle ``theta`` from +z, azimuth ``phi`` from +x, both in radians."""
        st = np.sin(theta)
        return cls(st * np.cos(phi), st * np.sin(phi), np.cos(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "UnitAxis") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def angle_to(self, other: "UnitAxis") -> float:
        return float(np.arccos(np.clip(self.dot(other), -1.0, 1.0)))

    def __neg__(self) -> "UnitAxis":
        return UnitAxis(-self.x, -self.y, -self.z)

    @property
    def angles(self) -> tuple[float, float]:
        return float(np.arccos(np.clip(self.z, -1.0, 1.0))), float(np.arctan2(self.y, self.x))


Z_AXIS = UnitAxis(0.0, 0.0, 1.0)
X_AXIS = UnitAxis(1.0, 0.0, 0.0)
Y_AXIS = UnitAxis(0.0, 1.0, 0.0)


def axis_state_amplitudes(xyz: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Batched spin eigenkets: rows of ``xyz`` are unit axes, ``signs`` are +-1.

    Half-angle factors avoid the cancellation in sqrt((1 - |z|)/2) so the
    result stays accurate near both poles. Returns an array of shape (N, 2).
    """
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    signs = np.broadcast_to(np.asarray(signs), xyz.shape[:1])
    x, y, z = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    # take the larger half-angle factor from z, the smaller from sin(theta) = 2 s c
    rho = np.hypot(x, y)
    north = z >= 0
    big = np.sqrt(np.clip((1.0 + np.abs(z)) / 2.0, 0.5, 1.0))
    small = rho / (2.0 * big)
    c = np.where(north, big, small)
    s = np.where(north, small, big)
    # arctan2(0, 0) = 0 gives phase 1 on the poles
    phase = np.exp(1j * np.arctan2(y, x))
    plus = signs > 0
    out = np.empty((xyz.shape[0], 2), dtype=complex)
    out[:, 0] = np.where(plus, c, -s)
    out[:, 1] = np.where(plus, phase * s, phase * c)
    return out


def axis_state(axis: UnitAxis, sign: SignLike) -> PureState:
    """Eigenket of the spin component along ``axis`` with eigenvalue ``sign``.

    With ``axis`` at polar angles (theta, phi)::

        plus  -> ( cos(theta/2), e^{i phi} sin(theta/2))
        minus -> (-sin(theta/2), e^{i phi} cos(theta/2))

    The minus ket carries an overall -1 so that the z axis gives exactly
    (1, 0) and (0, 1), and the singlet built along z is (0, 1, -1, 0)/sqrt(2).
    """
    if not isinstance(axis, UnitAxis):
        axis = UnitAxis(*axis)
    amps = axis_state_amplitudes(axis.as_array(), np.array([int(as_sign(sign))]))[0]
    return PureState(amps)


def tensor(a: PureState, b: PureState) -> PureState:
    if a.num_qubits + b.num_qubits > MAX_QUBITS:
        raise CapacityError(
            f"{a.num_qubits} + {b.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
        )
    return PureState(_owned((a.amplitudes[:, None] * b.amplitudes).ravel()))


def is_unitary(gate: np.ndarray, atol: float = TOL) -> bool:
    gate = np.asarray(gate)
    return gate.shape == (2, 2) and float(np.abs(gate.conj().T @ gate - I2).max()) <= atol


def apply_one_qubit(gate, target: int, state: PureState) -> PureState:
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2, 2):
        raise DimensionError(f"gate must be 2x2, got {gate.shape}")
    if not is_unitary(gate):
        raise InvariantError("gate is not unitary")
    n = state.num_qubits
    if not 0 <= target < n:
        raise IndexError(f"target qubit {target} out of range for {n} qubits")
    return _apply_gate(gate, target, state)


def _apply_gate(gate: np.ndarray, target: int, state: PureState) -> PureState:
    if target == 0:
        out = gate @ state.amplitudes.reshape(2, -1)
    else:
        # view as (high, 2, low) so the gate acts on the middle index
        out = np.matmul(gate, state.amplitudes.reshape(2**target, 2, -1))
    return PureState(_owned(out.reshape(-1)))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 for two pure states of equal size."""
    if a.dim != b.dim:
        raise DimensionError(f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(f, 1.0))


def partial_trace(state: PureState, keep: int) -> DensityMatrix:
    """Reduced density matrix of the single qubit ``keep``."""
    n = state.num_qubits
    if n < 2:
        raise DimensionError("partial trace needs at least two qubits")
    if not 0 <= keep < n:
        raise IndexError(f"qubit {keep} out of range for {n} qubits")
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), keep, 0).reshape(2, -1)
    rho = psi @ psi.conj().T
    # symmetrize away rounding so the Hermitian check is exact
    return DensityMatrix((rho + rho.conj().T) / 2)


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    if rho.dim != 2:
        raise DimensionError(f"Bloch vector needs a single-qubit density matrix, got dim {rho.dim}")
    m = rho.matrix
    return np.array([np.trace(m @ p).real for p in (PAULI_X, PAULI_Y, PAULI_Z)])


def random_state(rng: np.random.Generator) -> PureState:
    """Haar-random qubit: two standard complex normals, normalized."""
    z = rng.standard_normal(4)
    norm = math.sqrt(z @ z)
    if norm < 1e-300:
        raise InvariantError("degenerate Gaussian draw")
    return PureState(_owned((z / norm).view(complex)))


def random_axis(rng: np.random.Generator) -> UnitAxis:
    """Uniform direction via inverse CDF on cos(theta)."""
    return UnitAxis.from_vector(sphere_points(rng, 1)[0])


def sphere_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` uniform points on the unit sphere, shape (n, 3).

    z is uniform on [-1, 1] (inverse CDF of cos(theta)) and the azimuth is
    uniform on [0, 2 pi); each point consumes exactly two uniforms.
    """
    u = rng.random((n, 2))
    z = 2.0 * u[:, 0] - 1.0
    phi = 2.0 * np.pi * u[:, 1]
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, 1.0))
    return np.column_stack((r * np.cos(phi), r * np.sin(phi), z))
