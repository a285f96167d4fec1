"""
Named gate experiments.

Each scenario is a GatePlan at the reference parameters (two Yb ions, 65 T/m,
nu = 2pi 500 kHz, eta = 0.01, K = 1). Terms and flip counts follow the runs that
the fidelity budget is built from.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List

from pydantic import BaseModel, ConfigDict

from core.exceptions import ArgumentError
from core.schedule import closed_loop_params
from schemas.params import PhysicalParams
from schemas.plan import GatePlan

ALL_MICROWAVE_ERRORS = ("gate", "crosstalk", "fast_rf", "xy_residual", "zz_residual")
LASER_ETA = 0.01

# The counter-rotating RF component leaves a Bell phase of about
# (Omega_r/Omega)(1/2 - cos 2 phi) after the flips; it vanishes where cos 2 phi = 1/2.
KICK_FREE_RF_PHASE = -math.pi / 6.0


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    description: str
    plan: GatePlan


def _microwave(terms, n_flips: int, **param_overrides) -> GatePlan:
    params = PhysicalParams.reference(rf_phase=KICK_FREE_RF_PHASE, **param_overrides)
    return GatePlan(params=params, enabled_terms=frozenset(terms), n_phase_flips=n_flips)


def _electric() -> GatePlan:
    params = PhysicalParams.reference(rf_phase=KICK_FREE_RF_PHASE)
    params = params.updated(omega_E=params.omega_r / 30.0)
    return GatePlan(params=params, enabled_terms=frozenset(ALL_MICROWAVE_ERRORS + ("electric",)), n_phase_flips=1)


def _laser() -> GatePlan:
    params = closed_loop_params(PhysicalParams.reference(), K=1, eta_laser=LASER_ETA)
    return GatePlan(
        params=params,
        enabled_terms=frozenset({"gate", "sideband_residual", "phonon_dephasing"}),
        n_phase_flips=0,
        eta_laser=LASER_ETA,
    )


_REGISTRY: Dict[str, tuple[str, Callable[[], GatePlan]]] = {
    "fig4-baseline": (
        "Ideal gate: gate term only, no flips",
        lambda: _microwave({"gate"}, 0),
    ),
    "fig5-1flip": (
        "All microwave error terms, one phase flip at tau/2",
        lambda: _microwave(ALL_MICROWAVE_ERRORS, 1),
    ),
    "fig5-19flip": (
        "All microwave error terms, 19 uniformly spaced phase flips",
        lambda: _microwave(ALL_MICROWAVE_ERRORS, 19),
    ),
    "fig5-99flip-no-crosstalk": (
        "All error terms except crosstalk, 99 phase flips",
        lambda: _microwave(set(ALL_MICROWAVE_ERRORS) - {"crosstalk"}, 99),
    ),
    "crosstalk-only": (
        "Gate plus single-addressing crosstalk, one phase flip",
        lambda: _microwave({"gate", "crosstalk"}, 1),
    ),
    "electric-field": (
        "All error terms plus the RF electric drive (Omega_E = Omega_r/30), one phase flip",
        _electric,
    ),
    "laser-variant": (
        "Laser realization at eta_L = 0.01, second-order Lamb-Dicke expansion",
        _laser,
    ),
}


def list_scenarios() -> List[Scenario]:
    return [get_scenario(name) for name in _REGISTRY]


def scenario_names() -> List[str]:
    return list(_REGISTRY)


def get_scenario(name: str) -> Scenario:
    try:
        description, factory = _REGISTRY[name]
    except KeyError:
        raise ArgumentError(f"unknown scenario '{name}'; known: {', '.join(_REGISTRY)}") from None
    return Scenario(name=name, description=description, plan=factory())
