# schemas/__init__.py

# Physical parameters
from .params import HierarchyLink, PhysicalParams

# Plans, schedules and integrator settings
from .plan import (
    LASER_LABELS,
    MICROWAVE_LABELS,
    GatePlan,
    IntegratorConfig,
    PulseEvent,
    PulseSchedule,
)

# Result records
from .results import NoiseBudget, ScenarioSummary, StarkBudget
