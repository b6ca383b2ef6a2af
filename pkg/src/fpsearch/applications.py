"""Uses of fixed-point search: relatively-prime state preparation and
oblivious amplitude amplification (OAA) on a small dense statevector."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import bounds, gate, ode
from . import geometry as geo
from .errors import DomainError
from .schedules import make_schedule

EULER_GAMMA = 0.57721566490153286
MAX_OAA_QUBITS = 12


# --------------------------------------------------------------------------
# relatively-prime state
# --------------------------------------------------------------------------


def totient(J):
    """Count of x in [1, J] with gcd(x, J) = 1, by direct enumeration."""
    J = int(J)
    if J < 1:
        raise DomainError("totient needs J >= 1")
    return int(np.count_nonzero(np.gcd(np.arange(1, J + 1), J) == 1))


def totient_table(n_max):
    """phi(J) for J = 0 .. n_max by a product sieve over primes (phi(0) = 0)."""
    phi = np.arange(n_max + 1, dtype=np.int64)
    for p in range(2, n_max + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def relprime_lower_bound(J):
    """1 / (e^gamma ln ln J + 3 / ln ln J), natural logarithms."""
    J = int(J)
    if J < 3:
        raise DomainError("lower bound needs J >= 3")
    ll = math.log(math.log(J))
    return 1.0 / (math.exp(EULER_GAMMA) * ll + 3.0 / ll)


@dataclass(frozen=True)
class RelPrimeInstance:
    J: int
    totient: int
    lam: float
    w_bound: float

    @classmethod
    def build(cls, J):
        J = int(J)
        if J < 3:
            raise DomainError("relatively-prime instance needs J >= 3")
        phi = totient(J)
        inst = cls(J=J, totient=phi, lam=phi / J, w_bound=relprime_lower_bound(J))
        if not inst.w_bound < inst.lam:
            raise DomainError(f"lower bound {inst.w_bound} does not hold for J={J}")
        return inst


def run_relprime_search(J, epsilon, dt=None, config=None):
    """Standard-schedule search with w from the totient lower bound.

    ``dt`` None runs the adiabatic evolution, otherwise the gate model with that
    step.  Returns (SimResult, RelPrimeInstance, report dict).
    """
    inst = RelPrimeInstance.build(J)
    sched = make_schedule("standard", epsilon, inst.w_bound)
    if dt is None:
        res = ode.evolve(sched, inst.lam, config)
        cost = sched.total_time
        bound = 2.0 * epsilon
    else:
        res, seq = gate.simulate_gate(sched, inst.lam, dt)
        cost = seq.query_count
        bound = bounds.theorem4_bound(sched, inst.lam, dt)
    report = {
        "J": inst.J,
        "totient": inst.totient,
        "lambda": inst.lam,
        "w_bound": inst.w_bound,
        "T_or_queries": cost,
        "delta": res.error_amplitude,
        "bound": bound,
    }
    return res, inst, report


# --------------------------------------------------------------------------
# oblivious amplitude amplification
# --------------------------------------------------------------------------


class Convention(str, enum.Enum):
    # H_E = Pi, H_B = U Pi U^dag
    AS_WRITTEN = "as_written"
    # H_E = I - Pi, H_B = I - U Pi U^dag (target in the ground space)
    COMPLEMENTED = "complemented"


def random_unitary(dim, rng):
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def ancilla_rotation(m, lam):
    """m-qubit unitary whose <0...0|A|0...0> = sqrt(lam): an RY on the first ancilla qubit."""
    half = math.acos(math.sqrt(lam))
    ry = np.array([[math.cos(half), -math.sin(half)], [math.sin(half), math.cos(half)]], dtype=complex)
    return np.kron(ry, np.eye(2 ** (m - 1), dtype=complex))


@dataclass
class OAAInstance:
    n: int
    m: int
    U: np.ndarray
    V: np.ndarray
    lam: float

    @property
    def dim(self):
        return 2 ** (self.n + self.m)

    def zero_ancilla(self, psi):
        """|0>^m |psi> with the ancilla register as the leading tensor factor."""
        out = np.zeros(self.dim, dtype=complex)
        out[: 2**self.n] = psi
        return out

    def target(self, psi):
        return self.zero_ancilla(self.V @ psi)

    def projector(self):
        diag = np.zeros(self.dim)
        diag[: 2**self.n] = 1.0
        return np.diag(diag).astype(complex)

    def measured_lambda(self, psi):
        start = self.U @ self.zero_ancilla(psi)
        return float(abs(np.vdot(self.target(psi), start)) ** 2)


def _check_unitary(mat, dim, name):
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (dim, dim):
        raise DomainError(f"{name} must be {dim}x{dim}")
    if np.max(np.abs(mat.conj().T @ mat - np.eye(dim))) > 1e-10:
        raise DomainError(f"{name} is not unitary")
    return mat


def verify_lambda_independence(instance, rng, trials=3, tol=1e-9):
    """Measured lambda on ``trials`` random inputs; raises if they differ by more than tol."""
    values = [instance.measured_lambda(random_state(2**instance.n, rng)) for _ in range(trials)]
    if max(values) - min(values) > tol or abs(values[0] - instance.lam) > tol:
        raise DomainError(f"start-state lambda depends on |psi>: {values}")
    return values


def build_oaa_unitary(n, m, lam, V, U=None, rng=None) -> OAAInstance:
    """U = A (x) V with A an ancilla rotation; a caller-supplied U is checked instead."""
    n, m = int(n), int(m)
    if n < 1 or m < 1 or n + m > MAX_OAA_QUBITS:
        raise DomainError(f"need n, m >= 1 and n + m <= {MAX_OAA_QUBITS}")
    lam = geo.check_lambda(lam)
    V = _check_unitary(V, 2**n, "V")
    if U is None:
        U = np.kron(ancilla_rotation(m, lam), V)
    else:
        U = _check_unitary(U, 2 ** (n + m), "U")
    inst = OAAInstance(n=n, m=m, U=U, V=V, lam=lam)
    verify_lambda_independence(inst, rng if rng is not None else np.random.default_rng(0))
    return inst


def _oaa_hamiltonians(instance, convention):
    pi = instance.projector()
    hb = instance.U @ pi @ instance.U.conj().T
    if Convention(convention) is Convention.COMPLEMENTED:
        eye = np.eye(instance.dim, dtype=complex)
        return eye - hb, eye - pi
    return hb, pi


def run_oblivious_amplification(instance, psi, sequence=None, schedule=None, convention=Convention.AS_WRITTEN,
                                config=None):
    """Success probability |<Phi|psi_final>|^2 with Phi = |0>^m V|psi>.

    Gate mode (``sequence``) applies U e^{-i alpha Pi} U^dag and e^{i beta Pi}
    per slice.  Adiabatic mode (``schedule``) integrates (1-s) H_B + s H_E
    under the chosen convention.
    """
    if (sequence is None) == (schedule is None):
        raise DomainError("give exactly one of sequence or schedule")
    if instance.dim > 2**MAX_OAA_QUBITS:
        raise DomainError("statevector dimension exceeds 2^12")
    psi = np.asarray(psi, dtype=complex)
    state = instance.U @ instance.zero_ancilla(psi)
    target = instance.target(psi)
    if sequence is not None:
        pi_diag = np.zeros(instance.dim)
        pi_diag[: 2**instance.n] = 1.0
        u, udag = instance.U, instance.U.conj().T
        for alpha, beta in zip(sequence.alphas, sequence.betas):
            state = np.where(pi_diag > 0, np.exp(1j * beta), 1.0) * state
            state = u @ (np.where(pi_diag > 0, np.exp(-1j * alpha), 1.0) * (udag @ state))
        return float(abs(np.vdot(target, state)) ** 2)

    config = config or ode.IntegratorConfig()
    hb, he = _oaa_hamiltonians(instance, convention)
    T = schedule.total_time
    # both Hamiltonians are projectors (or complements) so the spectrum lies in [0, 1]
    if config.step is not None:
        n_steps = max(1, math.ceil(T / config.step - 1e-9))
    else:
        n_steps = max(1, math.ceil(T / config.max_phase_per_step))

    def generator_at(t):
        s = np.asarray(schedule.s(np.clip(t, 0.0, T)))[:, None, None]
        return -1j * ((1.0 - s) * hb + s * he)

    final, *_ = ode.propagate(generator_at, T, n_steps, state, 0, config.renormalize)
    final = final / np.linalg.norm(final)
    return float(abs(np.vdot(target, final)) ** 2)
