"""Two-level reduction of the search problem.

The search runs in span{|E>, |Ebar>}, written in the rotated basis

    |0> =  cos(mu)|Ebar> + sin(mu)|E>,    |1> = -sin(mu)|Ebar> + cos(mu)|E>,
    cos(2 mu) = sqrt(1 - lam),

where the begin and end Hamiltonians point along n0 = (sqrt(lam), 0, sqrt(1-lam))
and n1 = (sqrt(lam), 0, -sqrt(1-lam)).  Every Hamiltonian here has the form
``c*I - (1/2) v . sigma``; the ground state is the Bloch point v/|v| and the
eigenvalue gap is |v|.

Functions taking ``s`` accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

NORM_TOL = 1e-9
# s values produced by float arithmetic may stray this far outside [0, 1]
_S_SLACK = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


def check_lambda(lam):
    lam = float(lam)
    if not (0.0 < lam <= 1.0) or math.isnan(lam):
        raise DomainError(f"target fraction must lie in (0, 1], got {lam!r}")
    return lam


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < -_S_SLACK) or np.any(arr > 1.0 + _S_SLACK):
        raise DomainError(f"interpolation parameter s must lie in [0, 1], got {s!r}")
    arr = np.clip(arr, 0.0, 1.0)
    return float(arr) if arr.ndim == 0 else arr


# --------------------------------------------------------------------------
# states and Bloch vectors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QubitState:
    """Pure state amp0|0> + amp1|1>.  Global phase carries no meaning."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm2 = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm2 - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (|psi|^2 = {norm2!r})")

    @classmethod
    def from_vector(cls, vec, normalize=False):
        vec = np.asarray(vec, dtype=complex).reshape(2)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(complex(vec[0]), complex(vec[1]))

    @property
    def vector(self):
        return np.array([self.amp0, self.amp1], dtype=complex)

    def overlap(self, other):
        """<self|other>."""
        return np.conj(self.amp0) * other.amp0 + np.conj(self.amp1) * other.amp1


def fidelity(a, b):
    """|<a|b>|^2 for QubitStates or raw vectors."""
    va = a.vector if isinstance(a, QubitState) else np.asarray(a, dtype=complex)
    vb = b.vector if isinstance(b, QubitState) else np.asarray(b, dtype=complex)
    return float(abs(np.vdot(va, vb)) ** 2)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def array(self):
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def norm(self):
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    @classmethod
    def from_array(cls, arr):
        x, y, z = (float(v) for v in arr)
        return cls(x, y, z)


def bloch_of_state(state: QubitState) -> BlochVector:
    if not isinstance(state, QubitState):
        state = QubitState.from_vector(state)
    c = np.conj(state.amp0) * state.amp1
    return BlochVector(
        2.0 * c.real,
        2.0 * c.imag,
        abs(state.amp0) ** 2 - abs(state.amp1) ** 2,
    )


def state_of_bloch(r: BlochVector) -> QubitState:
    """cos(xi/2)|0> + e^{i phi} sin(xi/2)|1> for r at polar angle xi, azimuth phi."""
    if not isinstance(r, BlochVector):
        r = BlochVector.from_array(r)
    if abs(r.norm - 1.0) > NORM_TOL:
        raise DomainError(f"Bloch vector must be a unit vector, |r| = {r.norm!r}")
    xi = math.atan2(math.hypot(r.x, r.y), r.z)
    phi = math.atan2(r.y, r.x)
    return QubitState(math.cos(xi / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(xi / 2))


def rotation_y(angle):
    """exp(i (angle/2) Y): rotates Bloch vectors by -angle about y."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


# --------------------------------------------------------------------------
# Hamiltonians
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Hamiltonian2:
    """identity_coeff * I - (1/2) pauli_coeff . sigma."""

    identity_coeff: float
    pauli_coeff: tuple

    def __post_init__(self):
        coeff = tuple(float(v) for v in self.pauli_coeff)
        if len(coeff) != 3:
            raise DomainError("pauli_coeff needs three components")
        object.__setattr__(self, "pauli_coeff", coeff)
        object.__setattr__(self, "identity_coeff", float(self.identity_coeff))

    @property
    def gap(self):
        return float(np.linalg.norm(self.pauli_coeff))

    def matrix(self):
        vx, vy, vz = self.pauli_coeff
        return self.identity_coeff * IDENTITY - 0.5 * (vx * PAULI_X + vy * PAULI_Y + vz * PAULI_Z)

    def ground_state(self) -> QubitState:
        g = self.gap
        if g == 0.0:
            return QubitState(1.0, 0.0)
        return state_of_bloch(BlochVector.from_array(np.asarray(self.pauli_coeff) / g))


# --------------------------------------------------------------------------
# interpolation geometry
# --------------------------------------------------------------------------


def gap(lam, s):
    """Eigenvalue gap sqrt(1 - 4 s (1-s) (1-lam)) of the interpolated Hamiltonian."""
    lam = check_lambda(lam)
    s = _check_s(s)
    # lam + (1-lam)(1-2s)^2 is the same quantity without cancellation near s = 1/2
    return np.sqrt(lam + (1.0 - lam) * (1.0 - 2.0 * s) ** 2)


def theta(lam, s):
    """Angle between the Hamiltonian direction n(s) and the z axis, in [0, pi]."""
    lam = check_lambda(lam)
    s = _check_s(s)
    # arctan2 form of arccos((1-2s) sqrt(1-lam) / gap); exact at the poles
    return np.arctan2(math.sqrt(lam), (1.0 - 2.0 * s) * math.sqrt(1.0 - lam))


def dtheta_ds(lam, s):
    lam = check_lambda(lam)
    s = _check_s(s)
    return 2.0 * math.sqrt(lam * (1.0 - lam)) / gap(lam, s) ** 2


def hamiltonian_direction(lam, s):
    """Unit vector n(s) = (sqrt(lam), 0, sqrt(1-lam)(1-2s)) / gap."""
    th = theta(lam, s)
    return np.array([math.sin(th), 0.0, math.cos(th)])


def hamiltonian(lam, s) -> Hamiltonian2:
    lam = check_lambda(lam)
    s = _check_s(s)
    return Hamiltonian2(0.5, (math.sqrt(lam), 0.0, math.sqrt(1.0 - lam) * (1.0 - 2.0 * s)))


def begin_state(lam) -> QubitState:
    """Ground state of the initial Hamiltonian (Bloch point n0)."""
    half = float(theta(lam, 0.0)) / 2
    return QubitState(math.cos(half), math.sin(half))


def end_state(lam) -> QubitState:
    """Ground state of the final Hamiltonian (Bloch point n1): the uniform target superposition."""
    half = float(theta(lam, 1.0)) / 2
    return QubitState(math.cos(half), math.sin(half))


def end_state_complement(lam) -> QubitState:
    """The state orthogonal to end_state(lam) inside the two-level space."""
    half = float(theta(lam, 1.0)) / 2
    return QubitState(-math.sin(half), math.cos(half))


def theta_dot(lam, s, ds_dt):
    return dtheta_ds(lam, s) * np.asarray(ds_dt, dtype=float)


def chi_angle(lam, s, ds_dt):
    """Tilt of the rotating-frame Hamiltonian away from z: arctan(theta_dot / gap)."""
    return np.arctan(theta_dot(lam, s, ds_dt) / gap(lam, s))


def effective_hamiltonian_phi(lam, s, ds_dt) -> Hamiltonian2:
    """Hamiltonian seen in the frame exp(i theta Y / 2)|psi>: I/2 - gap Z/2 - theta_dot Y/2."""
    return Hamiltonian2(0.5, (0.0, float(theta_dot(lam, s, ds_dt)), float(gap(lam, s))))
