"""Fixed-point adiabatic quantum search in the two-level reduction.

Submodules:

* :mod:`fpsearch.geometry`      -- gap, tilt angle, Hamiltonians, Bloch-sphere maps
* :mod:`fpsearch.schedules`     -- interpolation schedule families s(t)
* :mod:`fpsearch.bounds`        -- adiabatic error bounds and exact error formula
* :mod:`fpsearch.ode`           -- Schroedinger integration (lab and rotating frame)
* :mod:`fpsearch.gate`          -- Trotterized gate-model simulation
* :mod:`fpsearch.applications`  -- relatively-prime state preparation, oblivious amplification
* :mod:`fpsearch.verify`        -- numerical claim suites
* :mod:`fpsearch.cli`           -- command-line front end
"""

from .errors import DomainError, IntegrationError, QuadratureError
from .geometry import (
    BlochVector,
    Hamiltonian2,
    QubitState,
    begin_state,
    bloch_of_state,
    chi_angle,
    dtheta_ds,
    effective_hamiltonian_phi,
    end_state,
    gap,
    hamiltonian,
    state_of_bloch,
    theta,
)
from .schedules import Schedule, ScheduleKind, ScheduleParams, TabulatedSchedule, make_schedule

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "DomainError",
    "Hamiltonian2",
    "IntegrationError",
    "QuadratureError",
    "QubitState",
    "Schedule",
    "ScheduleKind",
    "ScheduleParams",
    "TabulatedSchedule",
    "begin_state",
    "bloch_of_state",
    "chi_angle",
    "dtheta_ds",
    "effective_hamiltonian_phi",
    "end_state",
    "gap",
    "hamiltonian",
    "make_schedule",
    "state_of_bloch",
    "theta",
]
