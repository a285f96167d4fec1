"""
Run configuration for the command-line tool.

A config file is a flat YAML mapping of dotted keys to scalars or lists::

    scenario: fig5-1flip
    plan.n_phase_flips: 19
    params.omega_r.khz_2pi: 99
    integrator.method: magnus4
    sweep.parameter: plan.n_phase_flips
    sweep.values: [1, 19, 99]
    parallel_jobs: 3

Frequency keys may end in a unit suffix (``hz_2pi``, ``khz_2pi``, ``mhz_2pi``,
``ghz_2pi``, ``rad_s``); values are converted to rad/s once, here.
"""

from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Literal, Optional, Union

import psutil
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import settings
from core.exceptions import ConfigurationError, GateSimError
from core.scenarios import get_scenario
from core.schedule import closed_loop_params
from schemas.params import PhysicalParams
from schemas.plan import Axis, GatePlan, IntegratorConfig
from utils.units import FREQUENCY_SUFFIXES, to_angular

PLAN_FIELDS = (
    "n_phase_flips",
    "enabled_terms",
    "initial_spins",
    "initial_phonons",
    "phonon_cutoff",
    "eta_laser",
    "pi_pulse_axis",
)


class PlanOverrides(BaseModel):
    """Overrides of the scenario's GatePlan. Setting K re-derives the drive from the closure condition."""

    model_config = ConfigDict(extra="forbid")

    K: Optional[int] = Field(default=None, ge=1)
    n_phase_flips: Optional[int] = Field(default=None, ge=0)
    enabled_terms: Optional[FrozenSet[str]] = None
    initial_spins: Optional[str] = None
    initial_phonons: Optional[int] = Field(default=None, ge=0)
    phonon_cutoff: Optional[int] = Field(default=None, ge=2)
    eta_laser: Optional[float] = Field(default=None, gt=0.0)
    pi_pulse_axis: Optional[Axis] = None

    @field_validator("enabled_terms", mode="before")
    @classmethod
    def _split_terms(cls, v):
        if isinstance(v, str):
            return frozenset(t.strip() for t in v.split(",") if t.strip())
        return v


class ParamOverrides(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nu: Optional[float] = None
    eta: Optional[float] = None
    omega_drive: Optional[float] = None
    omega_r: Optional[float] = None
    delta_omega0: Optional[float] = None
    omega_E: Optional[float] = None
    omega0: Optional[float] = None
    rf_source: Optional[Literal["rf", "detuned_microwave"]] = None
    ion_mass: Optional[float] = None
    b_gradient: Optional[float] = None
    g_factor: Optional[float] = None


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = Field(default_factory=lambda: settings.OUTPUT.DIRECTORY)


class SweepSection(BaseModel):
    """One parameter varied over a list of values, e.g. ``plan.n_phase_flips`` or ``params.omega_E``."""

    model_config = ConfigDict(extra="forbid")

    parameter: str
    values: List[Any] = Field(min_length=1)

    @model_validator(mode="after")
    def _known_parameter(self) -> "SweepSection":
        section, _, name = self.parameter.partition(".")
        known = {"plan": set(PlanOverrides.model_fields), "params": set(ParamOverrides.model_fields)}
        if section not in known or name not in known[section]:
            raise ValueError(f"cannot sweep '{self.parameter}'; use plan.<field> or params.<field>")
        return self

    @property
    def section(self) -> str:
        return self.parameter.partition(".")[0]

    @property
    def name(self) -> str:
        return self.parameter.partition(".")[2]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: Optional[str] = None
    plan: PlanOverrides = Field(default_factory=PlanOverrides)
    params: ParamOverrides = Field(default_factory=ParamOverrides)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    output: OutputSection = Field(default_factory=OutputSection)
    sweep: Optional[SweepSection] = None
    parallel_jobs: int = Field(default=1, description="Concurrent sweep jobs; 0 means one per physical core")

    @field_validator("parallel_jobs")
    @classmethod
    def _resolve_jobs(cls, v: int) -> int:
        if v < 0:
            raise ValueError("parallel_jobs must be nonnegative")
        if v == 0:
            return max(psutil.cpu_count(logical=False) or 1, 1)
        return v

    @property
    def name(self) -> str:
        return self.scenario or "custom"

    def resolve_plan(self, sweep_value: Any = None) -> GatePlan:
        """The GatePlan this config describes, with the sweep value applied when given."""
        try:
            base = get_scenario(self.scenario).plan if self.scenario else GatePlan(params=PhysicalParams.reference())
        except GateSimError as exc:
            raise ConfigurationError(str(exc), key="scenario") from exc

        params = base.params.model_dump(exclude={"epsilon"})
        params.update(self.params.model_dump(exclude_none=True))
        fields = {name: getattr(base, name) for name in PLAN_FIELDS}
        fields.update(self.plan.model_dump(exclude_none=True, exclude={"K"}))
        K = self.plan.K

        key = "plan"
        if sweep_value is not None and self.sweep is not None:
            key = self.sweep.parameter
            if self.sweep.section == "params":
                params[self.sweep.name] = sweep_value
            elif self.sweep.name == "K":
                K = int(sweep_value)
            else:
                fields[self.sweep.name] = sweep_value

        try:
            p = PhysicalParams(**params)
            if K is not None:
                p = closed_loop_params(p, K, fields.get("eta_laser"))
            return GatePlan(params=p, **fields)
        except ValidationError as exc:
            raise ConfigurationError(f"invalid plan: {_first_error(exc)}", key=key) from exc


# --- Loading ---

def _dotted(loc) -> str:
    return ".".join(str(part) for part in loc)


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    return f"{_dotted(error['loc'])}: {error['msg']}" if error["loc"] else error["msg"]


def _flatten(raw: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in raw.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, dotted + "."))
        else:
            flat[dotted] = value
    return flat


def _convert(key: str, value: Any) -> tuple[str, Any]:
    """Strip a frequency suffix and convert the value (or each list element) to rad/s."""
    head, _, suffix = key.rpartition(".")
    if not head or suffix not in FREQUENCY_SUFFIXES:
        return key, value
    if isinstance(value, list):
        return head, [to_angular(v, suffix) for v in value]
    return head, to_angular(value, suffix)


def parse_run_config(raw: Union[Dict[str, Any], None]) -> RunConfig:
    """Validate a (flat or nested) mapping into a RunConfig."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a mapping of dotted keys to values")

    nested: Dict[str, Any] = {}
    for key, value in _flatten(raw).items():
        try:
            key, value = _convert(str(key), value)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"'{key}': {exc}", key=str(key)) from exc
        if key == "sweep.parameter" and isinstance(value, str):
            value = value.rpartition(".")[0] if value.rpartition(".")[2] in FREQUENCY_SUFFIXES else value
        node = nested
        *parents, leaf = key.split(".")
        for part in parents:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"'{key}' conflicts with a scalar key", key=key)
        if leaf in node:
            raise ConfigurationError(f"'{key}' is given more than once", key=key)
        node[leaf] = value

    _apply_sweep_units(raw, nested)
    try:
        return RunConfig.model_validate(nested)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = _dotted(error["loc"])
        raise ConfigurationError(f"'{key}': {error['msg']}", key=key) from exc


def _apply_sweep_units(raw: Dict[str, Any], nested: Dict[str, Any]) -> None:
    """Sweep values follow the unit suffix written on sweep.parameter."""
    parameter = _flatten(raw).get("sweep.parameter")
    if not isinstance(parameter, str):
        return
    suffix = parameter.rpartition(".")[2]
    if suffix in FREQUENCY_SUFFIXES and isinstance(nested.get("sweep", {}).get("values"), list):
        nested["sweep"]["values"] = [to_angular(v, suffix) for v in nested["sweep"]["values"]]


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}", key="--config") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config file {path} is not valid YAML: {exc}", key="--config") from exc
    return parse_run_config(raw)
