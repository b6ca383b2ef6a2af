"""Schroedinger-equation integration for the two-level search.

The integrator is classical fixed-step RK4.  Because the equation is linear,
one RK4 step is a fixed matrix polynomial in the generators -iH evaluated at
t, t+h/2 and t+h; the step matrices are built in vectorized batches and
multiplied together by pairwise (tree) reduction.  This is algebraically the
same as stepping the state vector, and renormalizing only at sample points is
the same as renormalizing every step since rescaling commutes with a linear
map.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import DomainError, IntegrationError

_CHUNK = 1 << 15
_MAX_STEPS = 50_000_000
MIN_LAMBDA = 1e-8
MAX_NORM_DRIFT = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control for :func:`evolve`.

    ``step`` fixes h directly.  Otherwise h is the largest value with
    (gap + |theta_dot|) * h <= max_phase_per_step over the whole run.
    """

    step: float | None = None
    max_phase_per_step: float = 0.01
    renormalize: bool = True
    sample_count: int = 0

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise DomainError(f"fixed step must be positive, got {self.step!r}")
        if not 0 < self.max_phase_per_step <= 0.1:
            raise DomainError("max_phase_per_step must lie in (0, 0.1]")
        if int(self.sample_count) < 0:
            raise DomainError("sample_count must be >= 0")


@dataclass
class SimResult:
    final_state: geo.QubitState
    success_probability: float
    error_amplitude: float
    # rows of (t, s, fidelity with the instantaneous ground state)
    trajectory: np.ndarray | None = None
    steps: int = 0
    step_size: float = 0.0
    norm_drift: float = 0.0
    max_step_defect: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def delta(self):
        return self.error_amplitude

    def to_dict(self):
        out = {
            "P": self.success_probability,
            "delta": self.error_amplitude,
            "steps": self.steps,
            "step_size": self.step_size,
            "norm_drift": self.norm_drift,
        }
        out.update(self.extra)
        return out


# --------------------------------------------------------------------------
# linear RK4 machinery
# --------------------------------------------------------------------------


def ordered_product(mats):
    """mats[n-1] @ ... @ mats[1] @ mats[0] by pairwise reduction."""
    mats = np.asarray(mats)
    if mats.shape[0] == 0:
        return np.eye(mats.shape[-1], dtype=complex)
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(mats.shape[-1], dtype=mats.dtype)[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def rk4_step_matrices(gen_start, gen_mid, gen_end, h):
    """Batched RK4 propagators for y' = A(t) y given A at the start, middle and end of each step."""
    eye = np.eye(gen_start.shape[-1], dtype=complex)
    k1 = gen_start
    k2 = gen_mid @ (eye + 0.5 * h * k1)
    k3 = gen_mid @ (eye + 0.5 * h * k2)
    k4 = gen_end @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def pauli_generator(c0, vx, vy, vz):
    """-i (c0 I - (1/2)(vx X + vy Y + vz Z)) for arrays of coefficients, shape (K, 2, 2)."""
    c0, vx, vy, vz = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (c0, vx, vy, vz)))
    h = np.empty(c0.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = c0 - 0.5 * vz
    h[..., 1, 1] = c0 + 0.5 * vz
    h[..., 0, 1] = -0.5 * (vx - 1j * vy)
    h[..., 1, 0] = -0.5 * (vx + 1j * vy)
    return -1j * h


def propagate(generator_at, total_time, n_steps, psi0, n_samples=0, renormalize=True):
    """Integrate y' = A(t) y on [0, total_time] with n_steps RK4 steps.

    ``generator_at(t_array)`` returns A at each time, shape (K, d, d).
    Returns (final state, sample times, sample states, norm drift, max step defect).
    """
    if n_steps < 1:
        raise IntegrationError("need at least one step", n_steps=n_steps)
    if n_steps > _MAX_STEPS:
        raise IntegrationError("step size underflow: too many steps requested", n_steps=n_steps)
    h = total_time / n_steps
    if n_samples >= 2:
        bounds = np.unique(np.round(np.linspace(0, n_steps, n_samples)).astype(int))
    else:
        bounds = np.array([0, n_steps])
    psi = np.asarray(psi0, dtype=complex).copy()
    sample_states = [psi.copy()]
    drift = 0.0
    defect = 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        for c0 in range(a, b, _CHUNK):
            c1 = min(b, c0 + _CHUNK)
            k = np.arange(c0, c1)
            gens = generator_at(np.concatenate([k * h, (k + 0.5) * h, (k + 1) * h]))
            m = c1 - c0
            mats = rk4_step_matrices(gens[:m], gens[m : 2 * m], gens[2 * m :], h)
            gram = np.conj(np.swapaxes(mats, -1, -2)) @ mats - np.eye(mats.shape[-1])
            defect = max(defect, float(np.max(np.abs(gram))))
            psi = ordered_product(mats) @ psi
        nrm = float(np.linalg.norm(psi))
        if not math.isfinite(nrm):
            raise IntegrationError("non-finite state encountered", step=int(b))
        drift = max(drift, abs(nrm - 1.0))
        if drift > MAX_NORM_DRIFT:
            raise IntegrationError(
                f"norm drift {drift:.3e} exceeds {MAX_NORM_DRIFT:g}", step=int(b), norm_drift=drift
            )
        if renormalize:
            psi = psi / nrm
        sample_states.append(psi.copy())
    return psi, bounds * h, np.array(sample_states), drift, defect


# --------------------------------------------------------------------------
# two-level search evolution
# --------------------------------------------------------------------------


def _check_inputs(schedule, lam):
    lam = geo.check_lambda(lam)
    if lam < MIN_LAMBDA:
        raise DomainError(f"target fraction below {MIN_LAMBDA:g} is outside the supported range")
    return lam


def _max_rate(schedule, lam):
    t = np.linspace(0.0, schedule.total_time, 4001)
    s = np.asarray(schedule.s(t))
    sdot = np.asarray(schedule.ds_dt(t))
    return float(np.max(geo.gap(lam, s) + np.abs(geo.dtheta_ds(lam, s) * sdot)))


def choose_steps(schedule, lam, config):
    T = schedule.total_time
    if config.step is not None:
        return max(1, math.ceil(T / config.step - 1e-9))
    rate = _max_rate(schedule, lam)
    return max(1, math.ceil(T * rate / config.max_phase_per_step))


def _finish(psi, target, orth, times, states, fid_fn, schedule, drift, defect, n_steps):
    final = geo.QubitState.from_vector(psi, normalize=True)
    vec = final.vector
    P = float(abs(np.vdot(target, vec)) ** 2)
    delta = float(abs(np.vdot(orth, vec)))
    traj = None
    if fid_fn is not None:
        s_vals = np.asarray(schedule.s(np.clip(times, 0.0, schedule.total_time)))
        fids = fid_fn(times, s_vals, states)
        traj = np.column_stack([times, s_vals, fids])
    return SimResult(
        final_state=final,
        success_probability=min(1.0, P),
        error_amplitude=min(1.0, delta),
        trajectory=traj,
        steps=n_steps,
        step_size=schedule.total_time / n_steps,
        norm_drift=drift,
        max_step_defect=defect,
    )


def evolve(schedule, lam, config: IntegratorConfig | None = None) -> SimResult:
    """Integrate i d|psi>/dt = H(s(t))|psi> from the begin state; P = |<E|psi(T)>|^2."""
    config = config or IntegratorConfig()
    lam = _check_inputs(schedule, lam)
    sqrt_lam, sqrt_c = math.sqrt(lam), math.sqrt(1.0 - lam)
    T = schedule.total_time

    def generator_at(t):
        s = np.asarray(schedule.s(np.clip(t, 0.0, T)))
        return pauli_generator(0.5, sqrt_lam, 0.0, sqrt_c * (1.0 - 2.0 * s))

    n = choose_steps(schedule, lam, config)
    psi, times, states, drift, defect = propagate(
        generator_at, T, n, geo.begin_state(lam).vector, config.sample_count, config.renormalize
    )

    def fid(times, s_vals, states):
        th = geo.theta(lam, s_vals)
        ground = np.stack([np.cos(th / 2), np.sin(th / 2)], axis=-1)
        return _fidelity_rows(ground, states)

    return _finish(
        psi,
        geo.end_state(lam).vector,
        geo.end_state_complement(lam).vector,
        times,
        states,
        fid if config.sample_count >= 2 else None,
        schedule,
        drift,
        defect,
        n,
    )


def _fidelity_rows(ground, states):
    norms = np.sum(np.abs(states) ** 2, axis=-1)
    return np.abs(np.sum(np.conj(ground) * states, axis=-1)) ** 2 / norms


def evolve_phi_frame(schedule, lam, config: IntegratorConfig | None = None) -> SimResult:
    """Integrate in the frame exp(i theta Y/2)|psi>, where H_phi = I/2 - gap Z/2 - theta_dot Y/2.

    Starts from |0> and reports P = |<0|phi(T)>|^2.  The trajectory fidelity is
    taken with the ground state of H_phi, i.e. the Bloch point n_phi.
    """
    config = config or IntegratorConfig()
    lam = _check_inputs(schedule, lam)
    T = schedule.total_time

    def coeffs(t):
        t = np.clip(t, 0.0, T)
        s = np.asarray(schedule.s(t))
        sdot = np.asarray(schedule.ds_dt(t))
        return np.asarray(geo.gap(lam, s)), np.asarray(geo.dtheta_ds(lam, s) * sdot)

    def generator_at(t):
        g, thdot = coeffs(t)
        return pauli_generator(0.5, 0.0, thdot, g)

    n = choose_steps(schedule, lam, config)
    psi, times, states, drift, defect = propagate(
        generator_at, T, n, np.array([1.0, 0.0], dtype=complex), config.sample_count, config.renormalize
    )

    def fid(times, s_vals, states):
        g, thdot = coeffs(times)
        chi = np.arctan2(thdot, g)
        # ground state of I/2 - (m/2)(sin chi Y + cos chi Z) is the Bloch point (0, sin chi, cos chi)
        ground = np.stack([np.cos(chi / 2), 1j * np.sin(chi / 2)], axis=-1)
        return _fidelity_rows(ground, states)

    return _finish(
        psi,
        np.array([1.0, 0.0], dtype=complex),
        np.array([0.0, 1.0], dtype=complex),
        times,
        states,
        fid if config.sample_count >= 2 else None,
        schedule,
        drift,
        defect,
        n,
    )


def _evolve_indexed(args):
    schedule, lam, config = args
    return evolve(schedule, lam, config)


def sweep_lambda(schedule, lambda_grid, config: IntegratorConfig | None = None, jobs=1):
    """[(lam, SimResult)] in input order.  Points are independent; ``jobs`` > 1 uses a process pool."""
    config = config or IntegratorConfig()
    grid = [float(x) for x in lambda_grid]
    tasks = [(schedule, lam, config) for lam in grid]
    results = []
    if jobs and jobs > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            futures = [pool.submit(_evolve_indexed, task) for task in tasks]
            for i, fut in enumerate(futures):
                try:
                    results.append((grid[i], fut.result()))
                except Exception as exc:  # noqa: BLE001 - re-raised with the failing index
                    raise IntegrationError(f"sweep point {i} (lambda={grid[i]!r}) failed: {exc}", index=i) from exc
        return results
    for i, task in enumerate(tasks):
        try:
            results.append((grid[i], _evolve_indexed(task)))
        except (DomainError, IntegrationError) as exc:
            raise IntegrationError(f"sweep point {i} (lambda={grid[i]!r}) failed: {exc}", index=i) from exc
    return results
