"""Interpolation schedules s(t) for the adiabatic search.

Closed-form families (epsilon = slowness, w = lower bound on the target fraction):

    constant          ds/dt = eps                              T = 1/eps
    constant_primed   ds/dt = eps w                            T = 1/(eps w)
    fast              ds/dt = eps gap_w^3 / sqrt(w(1-w))       T = sqrt(1-w) / (eps sqrt(w))
    fast_primed       ds/dt = eps gap_w^3                      T = 1/(eps w)
    standard          ds/dt = eps gap_w^2                      T = phi_w / (eps sqrt(w(1-w)))

The primed families are the unprimed shapes with a remapped slowness:
constant_primed is constant with eps*w, fast_primed is fast with
eps*sqrt(w(1-w)).  Both follow from equating the defining ds/dt relations.

:class:`TabulatedSchedule` wraps arbitrary monotone (t, s) samples with a
shape-preserving cubic so the generic bound and simulation paths accept
user-defined schedules.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

# t may overshoot [0, T] by this much through integrator round-off
T_SLACK = 1e-9


class ScheduleKind(str, enum.Enum):
    CONSTANT = "constant"
    CONSTANT_PRIMED = "constant_primed"
    FAST = "fast"
    FAST_PRIMED = "fast_primed"
    STANDARD = "standard"


@dataclass(frozen=True)
class ScheduleParams:
    kind: ScheduleKind
    epsilon: float
    w: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        eps, w = float(self.epsilon), float(self.w)
        if not eps > 0 or not math.isfinite(eps):
            raise DomainError(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0.0 < w < 1.0:
            raise DomainError(f"w must lie in (0, 1), got {self.w!r}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "w", w)


def phi_w(w):
    """arctan(sqrt((1-w)/w)), the angle swept by the standard schedule."""
    w = float(w)
    if not 0.0 < w <= 1.0:
        raise DomainError(f"w must lie in (0, 1], got {w!r}")
    return math.atan(math.sqrt((1.0 - w) / w))


def _gap_w(w, s):
    return np.sqrt(w + (1.0 - w) * (1.0 - 2.0 * s) ** 2)


def _base_shape(params):
    """Map a family onto (shape, effective epsilon) with shape in {constant, fast, standard}."""
    kind, eps, w = params.kind, params.epsilon, params.w
    if kind is ScheduleKind.CONSTANT_PRIMED:
        return ScheduleKind.CONSTANT, eps * w
    if kind is ScheduleKind.FAST_PRIMED:
        return ScheduleKind.FAST, eps * math.sqrt(w * (1.0 - w))
    return kind, eps


def total_time(params: ScheduleParams) -> float:
    shape, eps = _base_shape(params)
    w = params.w
    if shape is ScheduleKind.CONSTANT:
        return 1.0 / eps
    if shape is ScheduleKind.FAST:
        return math.sqrt(1.0 - w) / (eps * math.sqrt(w))
    return phi_w(w) / (eps * math.sqrt(w * (1.0 - w)))


class Schedule:
    """Closed-form schedule of one family.  Immutable; s and ds_dt are vectorized."""

    def __init__(self, params: ScheduleParams):
        self._params = params
        self._shape, self._eps = _base_shape(params)
        self._total_time = total_time(params)

    @property
    def params(self):
        return self._params

    @property
    def total_time(self):
        return self._total_time

    @property
    def kind(self):
        return self._params.kind

    def __repr__(self):
        p = self._params
        return f"Schedule({p.kind.value}, epsilon={p.epsilon!r}, w={p.w!r}, T={self._total_time!r})"

    def __eq__(self, other):
        return isinstance(other, Schedule) and other._params == self._params

    def __hash__(self):
        return hash(self._params)

    def _check_t(self, t):
        arr = np.asarray(t, dtype=float)
        T = self._total_time
        if np.any(np.isnan(arr)) or np.any(arr < -T_SLACK) or np.any(arr > T + T_SLACK):
            raise DomainError(f"t must lie in [0, {T!r}], got {t!r}")
        return np.clip(arr, 0.0, T)

    def s(self, t):
        t = self._check_t(t)
        u = 1.0 - 2.0 * t / self._total_time
        w = self._params.w
        if self._shape is ScheduleKind.CONSTANT:
            out = t / self._total_time
        elif self._shape is ScheduleKind.FAST:
            out = 0.5 - 0.5 * u * np.sqrt(w / (1.0 - u * u * (1.0 - w)))
        else:
            out = 0.5 - 0.5 * math.sqrt(w / (1.0 - w)) * np.tan(u * phi_w(w))
        out = np.clip(out, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def speed_at_s(self, s):
        """ds/dt expressed as a function of s."""
        s = np.asarray(s, dtype=float)
        w = self._params.w
        if self._shape is ScheduleKind.CONSTANT:
            out = np.full_like(s, self._eps)
        elif self._shape is ScheduleKind.FAST:
            out = self._eps * _gap_w(w, s) ** 3 / math.sqrt(w * (1.0 - w))
        else:
            out = self._eps * _gap_w(w, s) ** 2
        return float(out) if out.ndim == 0 else out

    def ds_dt(self, t):
        return self.speed_at_s(self.s(t))


def make_schedule(kind, epsilon, w) -> Schedule:
    return Schedule(ScheduleParams(ScheduleKind(kind), epsilon, w))


class TabulatedSchedule:
    """User-defined schedule from monotone samples (t_k, s_k), with t_0 = 0, s_0 = 0, s_last = 1."""

    def __init__(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        if t.ndim != 1 or t.shape != s.shape or t.size < 2:
            raise DomainError("t and s must be matching 1-d arrays with at least two samples")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise DomainError("t samples must start at 0 and increase strictly")
        if abs(s[0]) > 1e-12 or abs(s[-1] - 1.0) > 1e-12:
            raise DomainError("s samples must run from 0 to 1")
        if np.any(np.diff(s) < 0):
            raise DomainError("s samples must be nondecreasing")
        self._t = t
        self._interp = PchipInterpolator(t, np.clip(s, 0.0, 1.0))
        self._deriv = self._interp.derivative()
        self._total_time = float(t[-1])

    @property
    def total_time(self):
        return self._total_time

    @property
    def knots(self):
        return self._t.copy()

    def _check_t(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(np.isnan(arr)) or np.any(arr < -T_SLACK) or np.any(arr > self._total_time + T_SLACK):
            raise DomainError(f"t must lie in [0, {self._total_time!r}], got {t!r}")
        return np.clip(arr, 0.0, self._total_time)

    def s(self, t):
        out = np.clip(self._interp(self._check_t(t)), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def ds_dt(self, t):
        out = np.maximum(self._deriv(self._check_t(t)), 0.0)
        return float(out) if out.ndim == 0 else out


def s_of_t(schedule, t):
    return schedule.s(t)


def ds_dt(schedule, t):
    return schedule.ds_dt(t)


def sample_schedule(schedule, samples):
    """(t, s, ds_dt) arrays at ``samples`` evenly spaced times including both ends."""
    if samples < 2:
        raise DomainError("need at least two samples")
    t = np.linspace(0.0, schedule.total_time, int(samples))
    return t, np.asarray(schedule.s(t)), np.asarray(schedule.ds_dt(t))
