import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from fpsearch import bounds, gate, make_schedule, ode
from fpsearch import geometry as geo


def _h0(lam):
    b = geo.begin_state(lam).vector
    return np.eye(2) - np.outer(b, b.conj())


@given(st.floats(-2 * math.pi, 2 * math.pi), st.floats(0.01, 1.0))
def test_partial_reflections_are_unitary(angle, lam):
    assert gate.is_unitary(gate.partial_reflection_begin(angle, lam))
    assert gate.is_unitary(gate.partial_reflection_end(angle, lam))


def test_zero_angle_is_identity_and_pi_is_reflection():
    lam = 0.3
    assert np.allclose(gate.partial_reflection_begin(0.0, lam), np.eye(2))
    r = gate.partial_reflection_begin(math.pi, lam)
    b = geo.begin_state(lam).vector
    perp = np.array([-b[1], b[0]])
    assert np.allclose(r @ b, -b)
    assert np.allclose(r @ perp, perp)


@given(st.floats(-3, 3), st.floats(0.01, 1.0))
def test_begin_reflection_is_phase_times_exponential(alpha, lam):
    # S_B(alpha) exp(-i alpha H0) = e^{-i alpha} I with H0 = I - |B><B|
    lhs = gate.partial_reflection_begin(alpha, lam) @ expm(-1j * alpha * _h0(lam))
    assert np.allclose(lhs, np.exp(-1j * alpha) * np.eye(2), atol=1e-12)


def test_angle_sequence_endpoints_and_midpoint():
    sched = make_schedule("standard", 0.05, 0.1)
    dt = sched.total_time / 100
    seq = gate.angle_sequence(sched, dt)
    assert len(seq) == 100
    assert seq.alphas[0] == pytest.approx(-dt) and seq.betas[0] == pytest.approx(0.0, abs=1e-15)
    assert seq.alphas[50] == pytest.approx(-dt / 2) and seq.betas[50] == pytest.approx(dt / 2)
    end = gate.angle_sequence(sched, dt, include_endpoint=True)
    assert end.alphas[-1] == pytest.approx(0.0) and end.betas[-1] == pytest.approx(dt)
    assert end.query_count == 2 * 101 + 1


def test_standard_closed_form_angles():
    w = 0.1
    sched = make_schedule("standard", 0.05, w)
    l = 80
    dt = sched.total_time / l
    seq = gate.angle_sequence(sched, dt)
    a, b = gate.standard_angles_closed_form(w, dt, l)
    assert np.allclose(seq.alphas, a, atol=1e-12)
    assert np.allclose(seq.betas, b, atol=1e-12)


def test_degenerate_sequence_is_flagged():
    sched = make_schedule("constant", 0.5, 0.5)
    with pytest.warns(RuntimeWarning):
        seq = gate.angle_sequence(sched, 10.0)
    assert seq.degenerate and len(seq) == 1 and seq.query_count == 3


def test_query_count_formula():
    sched = make_schedule("standard", 0.05, 0.1)
    for dt in (0.2, 0.1, 0.05, 0.025):
        _, seq = gate.simulate_gate(sched, 0.3, dt)
        assert seq.query_count == 1 + 2 * math.floor(sched.total_time / dt)
        assert seq.query_count % 2 == 1


def test_lambda_one_succeeds():
    res, _ = gate.simulate_gate(make_schedule("standard", 0.05, 0.1), 1.0, 0.3)
    assert res.success_probability == pytest.approx(1.0, abs=1e-12)


def test_theorem4_and_convergence():
    eps, w, lam = 0.05, 0.1, 0.3
    sched = make_schedule("standard", eps, w)
    p_ode = ode.evolve(sched, lam).success_probability
    diffs = []
    for dt in (0.2, 0.1, 0.05, 0.025):
        res, _ = gate.simulate_gate(sched, lam, dt)
        assert res.error_amplitude <= bounds.theorem4_standard(eps, dt) + 1e-6
        assert res.error_amplitude <= bounds.theorem4_bound(sched, lam, dt) + 1e-6
        diffs.append(abs(res.success_probability - p_ode))
    assert all(b < a for a, b in zip(diffs, diffs[1:]))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.01, 0.99), st.floats(1e-3, 2 * math.pi))
def test_effective_hamiltonian_reconstructs_trotter_step(s, lam, dt):
    data = gate.effective_trotter_hamiltonian(s, lam, dt)
    assert abs(data.n_t.norm - 1) < 1e-12
    u = expm(-1j * dt * data.hamiltonian().matrix())
    assert gate.phase_invariant_distance(u, gate.trotter_product(s, lam, dt)) < 1e-9


def test_small_dt_limit():
    for lam in (0.05, 0.5):
        for s in (0.0, 0.3, 0.5, 1.0):
            data = gate.effective_trotter_hamiltonian(s, lam, 1e-4)
            assert abs(data.gamma - float(geo.gap(lam, s))) <= 1e-6
            assert np.linalg.norm(data.n_t.array - geo.hamiltonian_direction(lam, s)) <= 1e-4


def test_midpoint_has_y_component():
    lam, dt = 0.3, 0.5
    data = gate.effective_trotter_hamiltonian(0.5, lam, dt)
    a = b = dt / 4
    g = data.gamma * dt / 2
    expected = -2 * math.sqrt(lam * (1 - lam)) * math.sin(a) * math.sin(b) / math.sin(g)
    assert data.n_t.y == pytest.approx(expected, rel=1e-12)
    assert data.n_t.y != 0


def test_eta_symmetry_and_endpoints():
    lam, dt = 0.3, 0.8
    for s in np.linspace(0, 1, 21):
        e1, e2 = gate.eta_angles(s, lam, dt)
        f1, f2 = gate.eta_angles(1 - s, lam, dt)
        assert e1 == pytest.approx(-f1, abs=1e-7)
        assert e2 == pytest.approx(f2, abs=1e-10)
    assert gate.eta_angles(0.0, lam, dt)[1] == pytest.approx(0.0, abs=1e-12)
    assert gate.eta_angles(1.0, lam, dt)[1] == pytest.approx(0.0, abs=1e-12)


def test_eta1_endpoint_limit_is_continuous():
    lam, dt = 0.3, 0.5
    at_zero = gate.eta_angles(0.0, lam, dt)[0]
    near = gate.eta_angles(1e-3, lam, dt)[0]
    assert abs(at_zero - near) < 1e-3
    grid = [abs(gate.eta_angles(s, lam, dt)[0]) for s in np.linspace(0, 1, 101)]
    assert max(grid) == pytest.approx(abs(at_zero), rel=1e-6)


@pytest.mark.parametrize("dt", [0.1, 1.0, 3.0, 2 * math.pi])
def test_eta_bounds(dt):
    for lam in (0.01, 0.3, 0.99):
        for s in np.linspace(0, 1, 21):
            e1, e2 = gate.eta_angles(s, lam, dt)
            assert abs(e1) <= dt / 4 + 1e-9
            assert e2 <= dt / 4 + 1e-9


def test_gamma_ratio_claim():
    assert gate.gamma_ratio_claim(0.3, 0.1) <= 2e-4
    assert gate.gamma_ratio_claim(0.3, 1e-3) == pytest.approx(0.0, abs=1e-6)
    for dt in (0.5, 2.0, 6.0):
        assert gate.gamma_ratio_claim(0.5, dt) <= dt**2 / 50


def test_sequence_unitary_matches_stepwise_application():
    sched = make_schedule("fast", 0.1, 0.2)
    seq = gate.angle_sequence(sched, 0.4)
    lam = 0.4
    psi = geo.begin_state(lam).vector
    for a, b in seq.pairs:
        psi = gate.trotter_step(a, b, lam) @ psi
    assert np.allclose(gate.sequence_unitary(seq, lam) @ geo.begin_state(lam).vector, psi, atol=1e-12)


def test_bad_step():
    from fpsearch import DomainError

    with pytest.raises(DomainError):
        gate.angle_sequence(make_schedule("fast", 0.1, 0.2), 0.0)
    with pytest.raises(DomainError):
        gate.effective_trotter_hamiltonian(0.3, 0.3, 7.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gate.angle_sequence(make_schedule("fast", 0.1, 0.2), 0.5)
