"""Numerical claim suites.

Every suite returns a list of :class:`ClaimResult`.  Default keyword values
are the full verification grids; :data:`QUICK` holds reduced grids for fast
interactive runs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import expm

from . import applications as apps
from . import bounds, gate, ode
from . import geometry as geo
from .schedules import make_schedule, phi_w, total_time, ScheduleParams

# constants that the Trotterized bound is pinned to; the guard suite compares against these
PINNED_CONSTANTS = {"TROTTER_SQRT_COEFF": 3.1, "TROTTER_QUAD_DIVISOR": 25.0}
ETA_SLACK = 1e-9


@dataclass
class ClaimResult:
    claim: str
    passed: bool
    value: float = math.nan
    threshold: float = math.nan
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        out = asdict(self)
        for key in ("value", "threshold"):
            if isinstance(out[key], float) and not math.isfinite(out[key]):
                out[key] = None
        return out


def _claim(name, value, threshold, passed=None, **detail):
    value, threshold = float(value), float(threshold)
    if passed is None:
        passed = value <= threshold
    return ClaimResult(name, bool(passed), value, threshold, detail)


# --------------------------------------------------------------------------


def suite_constants(values=None):
    """Guard against silent edits to the Trotter-bound constants."""
    current = values if values is not None else {
        "TROTTER_SQRT_COEFF": bounds.TROTTER_SQRT_COEFF,
        "TROTTER_QUAD_DIVISOR": bounds.TROTTER_QUAD_DIVISOR,
    }
    out = []
    for name, pinned in PINNED_CONSTANTS.items():
        got = float(current[name])
        out.append(_claim(f"constants.{name}", abs(got - pinned), 0.0, got == pinned, expected=pinned, actual=got))
    return out


def suite_theorem2(n=10, eps_range=(0.01, 0.2), w_range=(0.05, 0.9), tol=1e-6, jobs=1):
    """Fast schedule at lam = w against the exact error formula."""
    worst, where = 0.0, None
    for eps in np.linspace(*eps_range, n):
        for w in np.linspace(*w_range, n):
            sim = ode.evolve(make_schedule("fast", eps, w), w).error_amplitude
            err = abs(sim - bounds.theorem2_exact(eps, w))
            if err > worst:
                worst, where = err, (float(eps), float(w))
    return [_claim("theorem2.exactness", worst, tol, points=n * n, worst_at=where)]


def suite_theorem3(eps_values=(0.05, 0.1), w_values=(0.001, 0.01, 0.1), n_lambda=50, tol=1e-6, jobs=1):
    """Standard schedule: simulated error amplitude <= 2 eps for every lam >= w."""
    out = []
    for eps in eps_values:
        for w in w_values:
            sched = make_schedule("standard", eps, w)
            res = ode.sweep_lambda(sched, np.linspace(w, 1.0, n_lambda), jobs=jobs)
            deltas = np.array([r.error_amplitude for _, r in res])
            i = int(np.argmax(deltas))
            out.append(
                _claim(f"theorem3.fixed_point[eps={eps:g},w={w:g}]", deltas[i], 2 * eps + tol, worst_lambda=res[i][0])
            )
    return out


def scaling_slope(kind, epsilon=0.05, w_min=1e-4, w_max=1e-1, n=25):
    """Least-squares slope of log T against log w on a log-spaced w grid."""
    ws = np.logspace(math.log10(w_min), math.log10(w_max), n)
    ts = [total_time(ScheduleParams(kind, epsilon, w)) for w in ws]
    return float(np.polyfit(np.log(ws), np.log(ts), 1)[0])


def suite_scaling(tol=0.02):
    std = scaling_slope("standard")
    const = scaling_slope("constant_primed")
    return [
        _claim("scaling.standard_slope", abs(std + 0.5), tol, slope=std, target=-0.5),
        _claim("scaling.constant_primed_slope", abs(const + 1.0), tol, slope=const, target=-1.0),
    ]


def suite_non_fixed_point(eps_c=0.01, eps_f=0.05, w_values=(0.1, 0.01, 0.001), n_lambda=40, jobs=1):
    """The constant and fast schedules lose the fixed-point property."""
    lams = np.linspace(0.001, 0.02, 20)
    res = ode.sweep_lambda(make_schedule("constant", eps_c, 0.5), lams, jobs=jobs)
    const_max = max(r.error_amplitude for _, r in res)
    maxima = []
    for w in w_values:
        sweep = ode.sweep_lambda(make_schedule("fast", eps_f, w), np.geomspace(w, 1.0, n_lambda), jobs=jobs)
        maxima.append(max(r.error_amplitude for _, r in sweep))
    growing = all(b > a for a, b in zip(maxima, maxima[1:]))
    return [
        _claim("nonfixed.constant_reaches_half", const_max, 0.5, const_max >= 0.5, max_delta=const_max),
        _claim("nonfixed.fast_grows_as_w_shrinks", 0.0, 0.0, growing, w=list(w_values), max_delta=maxima),
    ]


def suite_appendix_a(eps=0.1, w_values=(0.01, 0.05, 0.2), n_lambda=30, tol=1e-9, grid_size=10_000):
    """Closed form vs total-variation quadrature, continuity at case edges, grid max <= 2 eps."""
    worst_q = 0.0
    cases_seen = set()
    for w in w_values:
        sched = make_schedule("standard", eps, w)
        for lam in np.linspace(w, 1.0, n_lambda):
            closed = bounds.theorem3_closed_standard(lam, eps, w)
            quad = bounds.theorem1_bound(sched, lam)
            cases_seen.add(closed.appendix_case.value)
            worst_q = max(worst_q, abs(closed.raw - quad.raw))
    jump = 0.0
    for w in w_values:
        for edge in (3 * w / (2 + w), (1 + 2 * w) / 3):
            lo = bounds.theorem3_closed_standard(edge * (1 - 1e-10), eps, w).raw
            hi = bounds.theorem3_closed_standard(edge * (1 + 1e-10), eps, w).raw
            jump = max(jump, abs(hi - lo))
    gmax = max(bounds.theorem3_max_check(eps, w, grid_size).value for w in w_values)
    return [
        _claim("appendixA.closed_vs_quadrature", worst_q, tol, cases=sorted(cases_seen)),
        _claim("appendixA.all_cases_covered", len(cases_seen), 3, len(cases_seen) == 3),
        _claim("appendixA.continuity", jump, 1e-8),
        _claim("appendixA.grid_max", gmax, 2 * eps * (1 + 1e-12)),
    ]


def suite_appendix_b(n_lambda=15, n_dt=30, n_s=41, tol=1e-9):
    """Trotter-frame angles, gamma ratio and exact reconstruction of the Trotter step."""
    eta1 = eta2 = gam = -math.inf
    recon = 0.0
    count = 0
    for lam in np.linspace(0.01, 0.99, n_lambda):
        for dt in np.linspace(2 * math.pi / n_dt, 2 * math.pi, n_dt):
            for s in np.linspace(0.0, 1.0, n_s):
                e1, e2 = gate.eta_angles(s, lam, dt)
                eta1 = max(eta1, abs(e1) - dt / 4)
                eta2 = max(eta2, e2 - dt / 4)
                data = gate.effective_trotter_hamiltonian(s, lam, dt)
                u = expm(-1j * dt * data.hamiltonian().matrix())
                recon = max(recon, gate.phase_invariant_distance(u, gate.trotter_product(s, lam, dt)))
                count += 1
            gam = max(gam, gate.gamma_ratio_claim(lam, dt) - dt * dt / 50)
    return [
        _claim("appendixB.eta1", eta1, ETA_SLACK, points=count),
        _claim("appendixB.eta2", eta2, ETA_SLACK, points=count),
        _claim("appendixB.gamma_ratio", gam, 0.0),
        _claim("appendixB.reconstruction", recon, tol),
    ]


def suite_gate(eps=0.05, w=0.1, dts=(0.2, 0.1, 0.05, 0.025), lams=(0.1, 0.3, 0.7), tol=1e-6):
    sched = make_schedule("standard", eps, w)
    T = sched.total_time
    worst = -math.inf
    monotone = True
    queries_ok = True
    diffs = {}
    for lam in lams:
        p_ode = ode.evolve(sched, lam).success_probability
        gaps = []
        for dt in dts:
            res, seq = gate.simulate_gate(sched, lam, dt)
            worst = max(worst, res.error_amplitude - bounds.theorem4_standard(eps, dt))
            gaps.append(abs(res.success_probability - p_ode))
            queries_ok &= seq.query_count == 1 + 2 * math.floor(T / dt + 1e-9)
        monotone &= all(b < a for a, b in zip(gaps, gaps[1:]))
        diffs[float(lam)] = gaps
    return [
        _claim("gate.theorem4", worst, tol),
        _claim("gate.convergence_monotone", 0.0, 0.0, monotone, diffs=diffs),
        _claim("gate.query_count", 0.0, 0.0, queries_ok),
    ]


def random_states(rng, count):
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def triangle_violations(q, r, s, slack=1e-12):
    """Vectorized count of |<q|r>|^2 < 1 - (e1 + e2)^2 - slack."""

    def fid(a, b):
        return np.abs(np.sum(np.conj(a) * b, axis=1)) ** 2

    e1 = np.sqrt(np.clip(1 - fid(q, s), 0, None))
    e2 = np.sqrt(np.clip(1 - fid(r, s), 0, None))
    return int(np.count_nonzero(fid(q, r) < 1 - (e1 + e2) ** 2 - slack))


DOMINANCE_FAMILIES = ("constant", "constant_primed", "fast", "fast_primed", "standard")


def suite_properties(seed=0, triples=100_000, eps_values=(0.05, 0.1), w_values=(0.01, 0.1), n_lambda=12, jobs=1):
    rng = np.random.default_rng(seed)
    q, r, s = (random_states(rng, triples) for _ in range(3))
    violations = triangle_violations(q, r, s)
    drift = 0.0
    frame = 0.0
    dom = -math.inf
    lams = np.geomspace(1e-3, 1.0, n_lambda)
    for kind in DOMINANCE_FAMILIES:
        for eps in eps_values:
            for w in w_values:
                sched = make_schedule(kind, eps, w)
                for lam, res in ode.sweep_lambda(sched, lams, jobs=jobs):
                    drift = max(drift, res.norm_drift)
                    dom = max(dom, res.error_amplitude - bounds.theorem1_bound(sched, lam).raw)
                    if kind == "standard":
                        phi = ode.evolve_phi_frame(sched, lam)
                        frame = max(frame, abs(phi.success_probability - res.success_probability))
    return [
        _claim("properties.norm_drift", drift, 1e-9),
        _claim("properties.frame_equivalence", frame, 1e-6),
        _claim("properties.fidelity_triangle", violations, 0, violations == 0, triples=triples, seed=seed),
        _claim("properties.bound_dominance", dom, 1e-6),
    ]


def oaa_profile(lams, eps=0.05, w=0.1, dt=0.1, n=2, m=1, seed=0):
    """(oaa, two_level) success probabilities of the gate sequence at each lam."""
    rng = np.random.default_rng(seed)
    seq = gate.angle_sequence(make_schedule("standard", eps, w), dt)
    V = apps.random_unitary(2**n, rng)
    psi = apps.random_state(2**n, rng)
    big, small = [], []
    for lam in lams:
        inst = apps.build_oaa_unitary(n, m, lam, V, rng=rng)
        big.append(apps.run_oblivious_amplification(inst, psi, sequence=seq))
        small.append(gate.run_sequence(seq, lam).success_probability)
    return np.array(big), np.array(small)


def suite_applications(j_max=100_000, seed=0, tol=1e-9):
    table = apps.totient_table(j_max)
    js = np.arange(3, j_max + 1)
    ll = np.log(np.log(js))
    lower = 1.0 / (math.exp(apps.EULER_GAMMA) * ll + 3.0 / ll)
    margin = float(np.min(table[3:] / js - lower))
    _, _, report = apps.run_relprime_search(12, 0.05)
    big, small = oaa_profile(np.linspace(0.05, 1.0, 20), seed=seed)
    return [
        _claim("apps.totient_lower_bound", -margin, 0.0, margin > 0, min_margin=margin, j_max=j_max),
        _claim("apps.relprime_J12", report["delta"], 0.1),
        _claim("apps.oaa_matches_two_level", float(np.max(np.abs(big - small))), tol),
    ]


SUITES = {
    "constants": suite_constants,
    "theorem2": suite_theorem2,
    "theorem3": suite_theorem3,
    "scaling": suite_scaling,
    "nonfixed": suite_non_fixed_point,
    "appendixA": suite_appendix_a,
    "appendixB": suite_appendix_b,
    "gate": suite_gate,
    "properties": suite_properties,
    "applications": suite_applications,
}

# reduced grids for interactive use
QUICK = {
    "theorem2": {"n": 3},
    "theorem3": {"w_values": (0.01, 0.1), "n_lambda": 10},
    "nonfixed": {"n_lambda": 15},
    "appendixA": {"n_lambda": 10, "grid_size": 1000},
    "appendixB": {"n_lambda": 4, "n_dt": 8, "n_s": 11},
    "gate": {"dts": (0.2, 0.1, 0.05), "lams": (0.3,)},
    "properties": {"triples": 10_000, "eps_values": (0.1,), "w_values": (0.1,), "n_lambda": 5},
    "applications": {"j_max": 2_000},
}


def run_suites(names=None, quick=False, seed=0, jobs=1):
    """Run the named suites (all by default); returns {suite: [ClaimResult]}."""
    names = list(SUITES) if not names else list(names)
    out = {}
    for name in names:
        kwargs = dict(QUICK.get(name, {})) if quick else {}
        func = SUITES[name]
        params = func.__code__.co_varnames[: func.__code__.co_argcount]
        if "seed" in params:
            kwargs["seed"] = seed
        if "jobs" in params:
            kwargs["jobs"] = jobs
        out[name] = func(**kwargs)
    return out
