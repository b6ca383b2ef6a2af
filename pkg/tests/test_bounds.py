import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpsearch import DomainError, TabulatedSchedule, bounds, make_schedule, ode
from fpsearch.bounds import AppendixCase


def test_constant_family_closed_form():
    eps, lam = 0.02, 0.3
    rep = bounds.theorem1_bound(make_schedule("constant", eps, 0.5), lam)
    d0, d1 = bounds.constant_schedule_terms(lam, eps)
    assert rep.d0 == pytest.approx(d0, rel=1e-12)
    assert rep.d1 == pytest.approx(d1, rel=1e-10)


@given(st.floats(0.01, 0.2), st.floats(0.01, 0.5), st.floats(0.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_fast_family_closed_form(eps, w, frac):
    lam = w + frac * (1 - w)
    rep = bounds.theorem1_bound(make_schedule("fast", eps, w), lam)
    d0, d1 = bounds.fast_schedule_terms(lam, eps, w)
    assert rep.d0 == pytest.approx(d0, rel=1e-12)
    assert rep.d1 == pytest.approx(d1, rel=1e-8, abs=1e-12)


def test_fast_at_lambda_equal_w():
    rep = bounds.theorem1_bound(make_schedule("fast", 0.05, 0.2), 0.2)
    assert rep.d0 == pytest.approx(0.1)
    assert rep.d1 == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("lam, case", [(0.06, AppendixCase.I), (0.2, AppendixCase.II), (0.8, AppendixCase.III)])
def test_piecewise_cases_match_quadrature(lam, case):
    eps, w = 0.1, 0.05
    closed = bounds.theorem3_closed_standard(lam, eps, w)
    assert closed.appendix_case is case
    quad = bounds.theorem1_bound(make_schedule("standard", eps, w), lam)
    assert closed.raw == pytest.approx(quad.raw, abs=1e-9)
    # brute-force grid variation converges from below
    dense = closed.d0 + bounds.dense_total_variation(make_schedule("standard", eps, w), lam)
    assert dense <= closed.raw + 1e-12
    assert dense == pytest.approx(closed.raw, abs=1e-8)


def test_case_boundaries_continuous():
    eps, w = 0.1, 0.05
    for edge in (3 * w / (2 + w), (1 + 2 * w) / 3):
        lo = bounds.theorem3_closed_standard(edge - 1e-9, eps, w).raw
        hi = bounds.theorem3_closed_standard(edge + 1e-9, eps, w).raw
        assert abs(lo - hi) < 1e-7


def test_case_at_lambda_w_is_two_eps_scaled():
    # at lam = w the bound is 2 c_half = 2 eps sqrt(1-w)
    eps, w = 0.1, 0.01
    assert bounds.theorem3_closed_standard(w, eps, w).raw == pytest.approx(2 * eps * math.sqrt(1 - w))


def test_grid_max_below_two_eps():
    for w in (0.001, 0.01, 0.1, 0.5):
        gm = bounds.theorem3_max_check(0.1, w, grid_size=2000)
        assert gm.value <= 0.2


def test_closed_form_rejects_lambda_below_w():
    with pytest.raises(DomainError):
        bounds.theorem3_closed_standard(0.01, 0.1, 0.05)


def test_theorem2_exact_values():
    eps, w = 0.05, 0.25
    root = math.sqrt(1 + 4 * eps**2)
    expected = 2 * eps / root * abs(math.sin(root / (2 * eps) * math.atan(math.sqrt(3))))
    assert bounds.theorem2_exact(eps, w) == pytest.approx(expected, rel=1e-14)
    assert bounds.theorem2_exact(eps, w) <= 2 * eps


def test_theorem2_matches_simulation():
    sched = make_schedule("fast", 0.05, 0.25)
    assert ode.evolve(sched, 0.25).error_amplitude == pytest.approx(bounds.theorem2_exact(0.05, 0.25), abs=1e-6)


def test_tabulated_schedule_generic_path():
    ref = make_schedule("standard", 0.1, 0.1)
    t = np.linspace(0, ref.total_time, 2001)
    tab = TabulatedSchedule(t, ref.s(t))
    a = bounds.theorem1_bound(ref, 0.3)
    b = bounds.theorem1_bound(tab, 0.3)
    assert b.raw == pytest.approx(a.raw, rel=1e-3)


def test_theorem4_properties():
    sched = make_schedule("standard", 0.05, 0.1)
    raw = bounds.theorem4_bound(sched, 0.3, 0.01, capped=False)
    thm1 = bounds.theorem1_bound(sched, 0.3).raw
    assert raw == pytest.approx(3.1 * 0.1 + thm1 * (1 + 1e-4 / 25))
    assert bounds.theorem4_bound(sched, 0.3, 2 * math.pi) == 1.0
    vals = [bounds.theorem4_bound(sched, 0.3, dt) for dt in (0.001, 0.01, 0.1, 1.0, 5.0)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert max(vals) <= 1.0
    assert bounds.theorem4_standard(0.05, 0.05) == pytest.approx(3.1 * math.sqrt(0.05) + 0.1 * (1 + 0.0025 / 25))


def test_bound_report_dict():
    rep = bounds.theorem3_closed_standard(0.5, 0.1, 0.1)
    d = rep.to_dict()
    assert set(d) == {"d0", "d1", "delta_bound", "raw", "case"}
    assert d["case"] == "III"


@pytest.mark.parametrize("kind", ["constant", "fast", "standard", "constant_primed", "fast_primed"])
def test_simulated_delta_below_general_bound(kind):
    sched = make_schedule(kind, 0.1, 0.05)
    for lam in (0.01, 0.05, 0.3, 0.9):
        res = ode.evolve(sched, lam)
        assert res.error_amplitude <= bounds.theorem1_bound(sched, lam).raw + 1e-6


def test_fidelity_triangle_check():
    rng = np.random.default_rng(1)
    for _ in range(200):
        vecs = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        assert bounds.fidelity_triangle_check(*vecs)


def test_total_variation_of_known_function():
    tv, extrema = bounds.total_variation(lambda u: np.sin(3 * np.pi * np.asarray(u)))
    assert tv == pytest.approx(6.0, abs=1e-10)
    assert len(extrema) == 3
