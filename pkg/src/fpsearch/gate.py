"""Gate-model (Trotterized) simulation of adiabatic search.

Each time slice applies S_B(alpha_j) S_E(beta_j) with alpha_j = -(1 - s_j) dt
and beta_j = s_j dt, s_j = s(j dt), for j = 0 .. l-1 and l = floor(T/dt).
The whole run uses 2l + 1 oracle queries.

The effective Hamiltonian H_t(s) = I/2 - (gamma/2) n_t . sigma is the exact
generator of one Trotter step, exp(-i H_t dt) = S_B S_E up to global phase.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import geometry as geo
from .errors import DomainError
from .ode import SimResult, ordered_product

UNITARY_TOL = 1e-12
# T/dt values within this of an integer count as that integer
_FLOOR_SLACK = 1e-9
_SIN_FLOOR = 1e-12


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _projector(state):
    v = state.vector
    return np.outer(v, v.conj())


def partial_reflection_begin(alpha, lam):
    """S_B(alpha) = I - (1 - e^{-i alpha}) |B><B|."""
    return np.eye(2, dtype=complex) - (1.0 - np.exp(-1j * alpha)) * _projector(geo.begin_state(lam))


def partial_reflection_end(beta, lam):
    """S_E(beta) = I - (1 - e^{+i beta}) |E><E|."""
    return np.eye(2, dtype=complex) - (1.0 - np.exp(1j * beta)) * _projector(geo.end_state(lam))


def trotter_step(alpha, beta, lam):
    return partial_reflection_begin(alpha, lam) @ partial_reflection_end(beta, lam)


@dataclass(frozen=True)
class GateSequence:
    alphas: np.ndarray
    betas: np.ndarray
    dt: float
    degenerate: bool = False

    @property
    def pairs(self):
        return list(zip(self.alphas.tolist(), self.betas.tolist()))

    def __len__(self):
        return int(self.alphas.size)

    @property
    def query_count(self):
        return 2 * len(self) + 1


def step_count(total_time, dt):
    return int(math.floor(total_time / dt + _FLOOR_SLACK))


def angle_sequence(schedule, dt, include_endpoint=False) -> GateSequence:
    """Partial-reflection angles for floor(T/dt) slices.

    With ``include_endpoint`` one more slice at s = 1 is appended.  When dt >= T
    the sequence degenerates to a single slice and is flagged.
    """
    dt = float(dt)
    if not dt > 0:
        raise DomainError("step size must be positive")
    T = schedule.total_time
    l = step_count(T, dt)
    degenerate = l <= 1
    if degenerate:
        warnings.warn(f"dt={dt!r} >= T={T!r}: single-slice degenerate sequence", RuntimeWarning, stacklevel=2)
        l = max(l, 1)
    s = np.asarray(schedule.s(np.minimum(np.arange(l) * dt, T)), dtype=float).reshape(-1)
    if include_endpoint:
        s = np.append(s, 1.0)
    return GateSequence(alphas=-(1.0 - s) * dt, betas=s * dt, dt=dt, degenerate=degenerate)


def standard_angles_closed_form(w, dt, l):
    """Standard-schedule angles for T split into exactly l slices of width dt."""
    from .schedules import phi_w

    j = np.arange(l)
    shift = 0.5 * dt * math.sqrt(w / (1.0 - w)) * np.tan((1.0 - 2.0 * j / l) * phi_w(w))
    return -0.5 * dt - shift, 0.5 * dt - shift


def sequence_unitary(sequence, lam):
    """Product of all slices, last slice leftmost."""
    if len(sequence) == 0:
        return np.eye(2, dtype=complex)
    mats = np.array([trotter_step(a, b, lam) for a, b in zip(sequence.alphas, sequence.betas)])
    return ordered_product(mats)


def run_sequence(sequence, lam):
    """Apply a sequence to the begin state; returns a SimResult."""
    lam = geo.check_lambda(lam)
    psi = sequence_unitary(sequence, lam) @ geo.begin_state(lam).vector
    final = geo.QubitState.from_vector(psi, normalize=True)
    P = geo.fidelity(geo.end_state(lam), final)
    delta = float(abs(geo.end_state_complement(lam).overlap(final)))
    return SimResult(
        final_state=final,
        success_probability=min(1.0, P),
        error_amplitude=min(1.0, delta),
        steps=len(sequence),
        step_size=sequence.dt,
        extra={"queries": sequence.query_count},
    )


def simulate_gate(schedule, lam, dt, include_endpoint=False):
    """Run the simulated adiabatic search; returns (SimResult, GateSequence)."""
    seq = angle_sequence(schedule, dt, include_endpoint=include_endpoint)
    return run_sequence(seq, lam), seq


# --------------------------------------------------------------------------
# effective Trotter Hamiltonian
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TrotterFrameData:
    gamma: float
    n_t: geo.BlochVector
    eta1: float | None = None
    eta2: float | None = None

    def hamiltonian(self):
        return geo.Hamiltonian2(0.5, tuple(self.gamma * self.n_t.array))


def _trotter_vector(s, lam, dt):
    """(sin g) n_t and cos g with g = gamma dt / 2."""
    a = (1.0 - s) * dt / 2.0
    b = s * dt / 2.0
    cos_g = math.cos(a - b) - 2.0 * lam * math.sin(a) * math.sin(b)
    vec = np.array(
        [
            math.sqrt(lam) * math.sin(a + b),
            -2.0 * math.sqrt(lam * (1.0 - lam)) * math.sin(a) * math.sin(b),
            math.sqrt(1.0 - lam) * math.sin(a - b),
        ]
    )
    return vec, cos_g


def effective_trotter_hamiltonian(s, lam, dt) -> TrotterFrameData:
    """gamma and n_t with exp(-i H_t dt) = S_B(-(1-s)dt) S_E(s dt) up to phase."""
    lam = geo.check_lambda(lam)
    s = float(geo._check_s(s))
    dt = float(dt)
    if not 0 < dt <= 2.0 * math.pi:
        raise DomainError("effective Trotter Hamiltonian needs 0 < dt <= 2 pi")
    vec, cos_g = _trotter_vector(s, lam, dt)
    sin_g = float(np.linalg.norm(vec))
    # atan2 form of arccos(cos_g): keeps full relative precision for small dt
    g = math.atan2(sin_g, cos_g)
    if sin_g < _SIN_FLOOR:
        n_t = geo.hamiltonian_direction(lam, s)
    else:
        n_t = vec / sin_g
    return TrotterFrameData(gamma=2.0 * g / dt, n_t=geo.BlochVector.from_array(n_t))


def _eta_raw(s, lam, dt):
    data = effective_trotter_hamiltonian(s, lam, dt)
    nx, ny, nz = data.n_t.array
    th = float(geo.theta(lam, s))
    num = nx * math.cos(th) - nz * math.sin(th)
    along = nx * math.sin(th) + nz * math.cos(th)
    n_hat = geo.hamiltonian_direction(lam, s)
    # angle between n_t and n: arccos(along) evaluated stably
    eta2 = math.atan2(float(np.linalg.norm(np.cross(data.n_t.array, n_hat))), along)
    return num, ny, eta2


def eta_angles(s, lam, dt):
    """Rotation angles (eta1, eta2) taking n_t onto n.

    eta1 = arctan(((n_t.x) cos theta - (n_t.z) sin theta) / n_t.y),
    eta2 = arccos((n_t.x) sin theta + (n_t.z) cos theta).
    At s = 0 and s = 1 the eta1 ratio is 0/0; its continuous limit from the
    interior is returned.  At lam = 1 eta1 is 0.
    """
    lam = geo.check_lambda(lam)
    s = float(geo._check_s(s))
    num, ny, eta2 = _eta_raw(s, lam, dt)
    if lam == 1.0:
        return 0.0, eta2
    if abs(ny) > 1e-9:
        return math.atan(num / ny), eta2
    # removable singularity at the ends: Richardson extrapolation from inside
    h = 1e-4
    sign = 1.0 if s < 0.5 else -1.0
    vals = []
    for k in (1, 2):
        n1, y1, _ = _eta_raw(s + sign * k * h, lam, dt)
        vals.append(math.atan(n1 / y1))
    return 2.0 * vals[0] - vals[1], eta2


def gamma_ratio_claim(lam, dt):
    """max_s gap(s)/gamma(s) - 1."""
    lam = geo.check_lambda(lam)

    def ratio(s):
        return float(geo.gap(lam, s)) / effective_trotter_hamiltonian(s, lam, dt).gamma

    grid = np.linspace(0.0, 1.0, 201)
    vals = np.array([ratio(x) for x in grid])
    i = int(np.argmax(vals))
    best = vals[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda x: -ratio(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        best = max(best, -res.fun)
    return best - 1.0


def trotter_product(s, lam, dt):
    return trotter_step(-(1.0 - s) * dt, s * dt, lam)


def phase_invariant_distance(u, v):
    """min over phi of max-entry |e^{i phi} u - v|, via the phase of tr(u^dag v)."""
    tr = np.trace(u.conj().T @ v)
    phase = tr / abs(tr) if abs(tr) > 0 else 1.0
    return float(np.max(np.abs(phase * u - v)))
