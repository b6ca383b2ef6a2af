"""Error bounds and exact error formulas for adiabatic search.

Notation: for a schedule s(t) and target fraction lam,

    c(s) = sqrt(lam (1-lam)) * (ds/dt) / gap_lam(s)^3

is the ratio of the two sides of the heuristic adiabatic condition.  The
general bound on the error amplitude is d0 + d1 with d0 = 2 c(0) and d1 the
total variation of c over the run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import geometry as geo
from .errors import DomainError, QuadratureError
from .schedules import Schedule, ScheduleKind, phi_w

# constants of the Trotterized bound, taken as given
TROTTER_SQRT_COEFF = 3.1
TROTTER_QUAD_DIVISOR = 25.0

D1_TOLERANCE = 1e-10
_EXTREMUM_XTOL = 1e-12
_SCAN_POINTS = 1001


class AppendixCase(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class BoundReport:
    d0: float
    d1: float
    delta_bound: float
    raw: float
    appendix_case: AppendixCase | None = None

    @classmethod
    def from_terms(cls, d0, d1, appendix_case=None):
        raw = d0 + d1
        return cls(d0=d0, d1=d1, delta_bound=min(1.0, raw), raw=raw, appendix_case=appendix_case)

    def to_dict(self):
        return {
            "d0": self.d0,
            "d1": self.d1,
            "delta_bound": self.delta_bound,
            "raw": self.raw,
            "case": None if self.appendix_case is None else self.appendix_case.value,
        }


@dataclass(frozen=True)
class AppendixAQuantities:
    c0: float
    c_half: float
    c_crit: float
    s_crit: float


# --------------------------------------------------------------------------
# the heuristic ratio c and its total variation
# --------------------------------------------------------------------------


def _speed_at_s(schedule, s):
    if isinstance(schedule, Schedule):
        return schedule.speed_at_s(s)
    # generic schedule: locate t(s) by root finding on the monotone s(t)
    T = schedule.total_time
    if s <= 0.0:
        return schedule.ds_dt(0.0)
    if s >= 1.0:
        return schedule.ds_dt(T)
    t = brentq(lambda x: schedule.s(x) - s, 0.0, T, xtol=1e-13 * max(1.0, T))
    return schedule.ds_dt(t)


def heuristic_ratio(schedule, lam, s):
    """sqrt(lam(1-lam)) * ds/dt / gap^3 at interpolation parameter s."""
    lam = geo.check_lambda(lam)
    g = geo.gap(lam, s)
    return float(math.sqrt(lam * (1.0 - lam)) * _speed_at_s(schedule, s) / g**3)


def _ratio_function(schedule, lam):
    """c as a function of a parameter u in [0, 1] along the run, plus the breakpoints to scan."""
    root = math.sqrt(lam * (1.0 - lam))
    if isinstance(schedule, Schedule):

        def c(u):
            u = np.clip(u, 0.0, 1.0)
            return root * np.asarray(schedule.speed_at_s(u)) / geo.gap(lam, u) ** 3

        extra = np.array([0.5])
    else:
        T = schedule.total_time

        def c(u):
            t = np.clip(u, 0.0, 1.0) * T
            return root * np.asarray(schedule.ds_dt(t)) / geo.gap(lam, schedule.s(t)) ** 3

        extra = getattr(schedule, "knots", np.array([])) / T
    return c, extra


def total_variation(func, extra_points=(), n_scan=_SCAN_POINTS):
    """Total variation of a smooth scalar function on [0, 1].

    Extrema are bracketed by sign changes of a central-difference derivative on
    the scan grid, refined by bisection-type root finding, and |change| is
    summed over the monotone pieces.  Returns (variation, extremum locations).
    """
    x = np.union1d(np.linspace(0.0, 1.0, n_scan), np.clip(np.asarray(extra_points, dtype=float), 0.0, 1.0))
    step = 1e-6

    def deriv(u):
        lo, hi = max(0.0, u - step), min(1.0, u + step)
        return (float(func(hi)) - float(func(lo))) / (hi - lo)

    values = np.asarray(func(x), dtype=float)
    if not np.all(np.isfinite(values)):
        raise QuadratureError("ratio function is not finite on the scan grid")
    scale = max(float(np.max(np.abs(values))), 1e-300)
    d = np.array([deriv(u) for u in x])
    signs = np.sign(d)
    signs[np.abs(d) < 1e-9 * scale] = 0.0

    extrema = []
    last_idx = None
    for i, sg in enumerate(signs):
        if sg == 0.0:
            continue
        if last_idx is not None and sg != signs[last_idx]:
            a, b = x[last_idx], x[i]
            try:
                root, info = brentq(deriv, a, b, xtol=_EXTREMUM_XTOL, full_output=True)
            except ValueError as exc:
                raise QuadratureError(f"could not bracket extremum in [{a}, {b}]: {exc}", b - a) from exc
            if not info.converged:
                raise QuadratureError("extremum refinement did not converge", abs(b - a))
            extrema.append(root)
        last_idx = i
    knots = np.array([0.0] + extrema + [1.0])
    vals = np.asarray(func(knots), dtype=float)
    return float(np.sum(np.abs(np.diff(vals)))), extrema


def theorem1_bound(schedule, lam) -> BoundReport:
    """d0 = 2 sqrt(lam(1-lam)) ds/dt(0); d1 = total variation of c over the run."""
    lam = geo.check_lambda(lam)
    d0 = 2.0 * math.sqrt(lam * (1.0 - lam)) * float(schedule.ds_dt(0.0))
    c, extra = _ratio_function(schedule, lam)
    d1, _ = total_variation(c, extra)
    return BoundReport.from_terms(d0, d1)


def dense_total_variation(schedule, lam, points=200_001):
    """Brute-force variation of c on a uniform grid; an independent check of d1 (converges from below)."""
    lam = geo.check_lambda(lam)
    c, _ = _ratio_function(schedule, lam)
    vals = c(np.linspace(0.0, 1.0, points))
    return float(np.sum(np.abs(np.diff(vals))))


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------


def theorem2_exact(epsilon_f, w):
    """Exact error amplitude of the fast schedule when lam = w."""
    eps = float(epsilon_f)
    if not eps > 0:
        raise DomainError("epsilon must be positive")
    if not 0.0 < w < 1.0:
        raise DomainError("w must lie in (0, 1)")
    root = math.sqrt(1.0 + 4.0 * eps * eps)
    return 2.0 * eps / root * abs(math.sin(root * phi_w(w) / (2.0 * eps)))


def constant_schedule_terms(lam, epsilon_c):
    """(d0, d1) of the constant-speed schedule."""
    lam = geo.check_lambda(lam)
    d0 = 2.0 * math.sqrt(lam * (1.0 - lam)) * epsilon_c
    d1 = 2.0 * math.sqrt(1.0 - lam) * (1.0 / lam - math.sqrt(lam)) * epsilon_c
    return d0, d1


def fast_schedule_terms(lam, epsilon_f, w):
    """(d0, d1) of the fast schedule for lam >= w."""
    lam = geo.check_lambda(lam)
    if lam < w:
        raise DomainError("closed form requires lam >= w")
    base = 2.0 * epsilon_f * math.sqrt(lam * (1.0 - lam)) / math.sqrt(w * (1.0 - w))
    return base, base * (1.0 - (w / lam) ** 1.5)


def appendix_a_quantities(lam, epsilon_s, w) -> AppendixAQuantities:
    lam = geo.check_lambda(lam)
    eps = float(epsilon_s)
    c0 = eps * math.sqrt(lam * (1.0 - lam))
    c_half = eps * w * math.sqrt(1.0 - lam) / lam
    if w < lam < 1.0:
        c_crit = 2.0 * eps * math.sqrt(lam) * (1.0 - w) ** 1.5 / (3.0 * math.sqrt(3.0 * (1.0 - lam) * (lam - w)))
        radicand = (2.0 * lam - 3.0 * w + lam * w) / ((1.0 - lam) * (1.0 - w))
        s_crit = 0.5 - 0.5 * math.sqrt(radicand) if 0.0 <= radicand <= 1.0 else math.nan
    else:
        c_crit, s_crit = math.nan, math.nan
    return AppendixAQuantities(c0=c0, c_half=c_half, c_crit=c_crit, s_crit=s_crit)


def appendix_a_case(lam, w) -> AppendixCase:
    if lam <= 3.0 * w / (2.0 + w):
        return AppendixCase.I
    if lam < (1.0 + 2.0 * w) / 3.0:
        return AppendixCase.II
    return AppendixCase.III


def theorem3_closed_standard(lam, epsilon_s, w) -> BoundReport:
    """Piecewise closed form of d0 + d1 for the standard schedule, w <= lam <= 1."""
    lam = geo.check_lambda(lam)
    if lam < w * (1.0 - 1e-12):
        raise DomainError(f"closed form requires lam >= w ({lam!r} < {w!r})")
    lam = max(lam, w)
    q = appendix_a_quantities(lam, epsilon_s, w)
    case = appendix_a_case(lam, w)
    if case is AppendixCase.I:
        total = 2.0 * q.c_half
    elif case is AppendixCase.II:
        total = 4.0 * q.c_crit - 2.0 * q.c_half
    else:
        total = 4.0 * q.c0 - 2.0 * q.c_half
    d0 = 2.0 * q.c0
    return BoundReport.from_terms(d0, total - d0, case)


@dataclass(frozen=True)
class GridMax:
    value: float
    lam: float
    case: AppendixCase


def theorem3_max_check(epsilon_s, w, grid_size=10_000) -> GridMax:
    """Largest closed-form bound over a uniform lam grid on [w, 1]."""
    grid = np.linspace(w, 1.0, int(grid_size))
    values = np.array([theorem3_closed_standard(lam, epsilon_s, w).raw for lam in grid])
    i = int(np.argmax(values))
    return GridMax(float(values[i]), float(grid[i]), appendix_a_case(grid[i], w))


def theorem4_bound(schedule, lam, dt, capped=True):
    """3.1 sqrt(dt) + (d0 + d1)(1 + dt^2/25) for the Trotterized algorithm.

    Error amplitudes never exceed 1, so the value is 1 for dt >= 2 pi and,
    with ``capped``, min(1, .) everywhere (which keeps it monotone in dt).
    """
    dt = float(dt)
    if not dt > 0:
        raise DomainError("step size must be positive")
    if dt >= 2.0 * math.pi:
        return 1.0
    rep = theorem1_bound(schedule, lam)
    raw = TROTTER_SQRT_COEFF * math.sqrt(dt) + rep.raw * (1.0 + dt * dt / TROTTER_QUAD_DIVISOR)
    return min(1.0, raw) if capped else raw


def theorem4_standard(epsilon_s, dt):
    """Trotterized bound for the standard schedule with d0 + d1 replaced by 2 epsilon."""
    return TROTTER_SQRT_COEFF * math.sqrt(dt) + 2.0 * epsilon_s * (1.0 + dt * dt / TROTTER_QUAD_DIVISOR)


# --------------------------------------------------------------------------
# fidelity triangle inequality
# --------------------------------------------------------------------------


def fidelity_triangle_check(Q, R, S, slack=1e-12):
    """|<Q|R>|^2 >= 1 - (e1 + e2)^2 with e1, e2 the infidelity amplitudes of Q, R against S."""
    states = []
    for st in (Q, R, S):
        if not isinstance(st, geo.QubitState):
            st = geo.QubitState.from_vector(st)
        states.append(st)
    q, r, s = states
    e1 = math.sqrt(max(0.0, 1.0 - geo.fidelity(q, s)))
    e2 = math.sqrt(max(0.0, 1.0 - geo.fidelity(r, s)))
    return geo.fidelity(q, r) >= 1.0 - (e1 + e2) ** 2 - slack


def is_standard(schedule):
    return isinstance(schedule, Schedule) and schedule.kind is ScheduleKind.STANDARD
