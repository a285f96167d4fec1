"""
The run, sweep and validate commands.

Each command returns a process exit code: 0 on success, otherwise the
``exit_code`` of the GateSimError that stopped it (2 configuration, 3 integration,
4 invariant violation). Any other exception maps to 1.
"""

import contextlib
import functools
import random
import time
from concurrent.futures import Future, ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple
from unittest import mock

import numpy as np
from tqdm import tqdm

from api import reports
from config.run_config import RunConfig, load_run_config, parse_run_config
from core.exceptions import ConfigurationError, DressingFieldError, GateSimError
from core.orchestrator import run_scenario
from schemas.plan import GatePlan, IntegratorConfig
from schemas.results import ScenarioSummary
from services.analysis import infidelity_decomposition
from services.corrections import addressing_splitting, ion_spacing, lamb_dicke_parameter
from services.hamiltonians import rwa_bounds
from utils.logging import get_logger
from utils.run_logger import RunLogger
from utils.units import to_hz

logger = get_logger(__name__)

UNEXPECTED_ERROR_EXIT_CODE = 1

_RANDOM_ENTRY_POINTS = (
    (np.random, "default_rng"),
    (np.random, "seed"),
    (np.random, "random"),
    (np.random, "rand"),
    (np.random, "randn"),
    (np.random, "normal"),
    (random, "random"),
    (random, "seed"),
)


@contextlib.contextmanager
def forbid_randomness() -> Iterator[None]:
    """Make every common random-number entry point raise for the duration."""

    def refuse(*args, **kwargs):
        raise AssertionError("random number generation is not allowed in a --seedless run")

    with contextlib.ExitStack() as stack:
        for module, name in _RANDOM_ENTRY_POINTS:
            stack.enter_context(mock.patch.object(module, name, refuse))
        yield


def _exit_code(command: Callable[..., int]) -> Callable[..., int]:
    """Map exceptions raised inside a command onto its exit code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> int:
        try:
            return command(*args, **kwargs)
        except GateSimError as exc:
            key = getattr(exc, "key", None)
            logger.error("Command failed", exc_info=exc, command=command.__name__, key=key)
            print(f"error: {exc}" + (f" (key: {key})" if key else ""))
            return exc.exit_code
        except Exception as exc:
            logger.error("Command failed unexpectedly", exc_info=exc, command=command.__name__)
            print(f"error: {type(exc).__name__}: {exc}")
            return UNEXPECTED_ERROR_EXIT_CODE

    return wrapper


def load_config(config_path: Optional[str], scenario: Optional[str] = None) -> RunConfig:
    """Config from a file, a bare scenario name, or both (the name wins)."""
    if config_path is None and scenario is None:
        raise ConfigurationError("give --config or --scenario", key="--config")
    config = load_run_config(config_path) if config_path else parse_run_config({})
    if scenario is not None:
        config = config.model_copy(update={"scenario": scenario})
    return config


def _output_dir(config: RunConfig, out: Optional[str]) -> Path:
    return Path(out) if out else Path(config.output.directory)


def _write_budget(plan: GatePlan, out_dir: Path, run_logger: RunLogger) -> None:
    try:
        reports.write_budget(plan.params, plan.gate_time, out_dir / "budget.csv")
    except DressingFieldError as exc:
        run_logger.warning("Budget skipped", {"reason": str(exc)})


# --- run ---

@_exit_code
def cmd_run(
    config_path: Optional[str] = None,
    out: Optional[str] = None,
    scenario: Optional[str] = None,
    seedless: bool = False,
    progress: bool = False,
) -> int:
    config = load_config(config_path, scenario)
    out_dir = _output_dir(config, out)
    run_logger = RunLogger(log_dir=out_dir)
    try:
        plan = config.resolve_plan()
        run_logger.config("Resolved plan", {"scenario": config.name, "terms": sorted(plan.enabled_terms)})
        run_logger.run("Starting run", {"scenario": config.name, "out": out_dir})

        guard = forbid_randomness() if seedless else contextlib.nullcontext()
        with guard:
            trajectory, summary = run_scenario(plan, cfg=config.integrator, name=config.name, progress=progress)

        reports.write_trajectory(trajectory, out_dir / "trajectory.csv")
        reports.write_summary(summary, plan, out_dir / "summary.txt")
        _write_budget(plan, out_dir, run_logger)
        run_logger.run("Run finished", {"fidelity": f"{summary.final_fidelity:.9f}", "infidelity": f"{summary.infidelity:.3e}"})
        print(f"{config.name}: F = {summary.final_fidelity:.6f}, IF = {summary.infidelity:.3e} -> {out_dir}")
        return 0
    except Exception as exc:
        run_logger.error("Run failed", {"error": type(exc).__name__, "message": str(exc)})
        raise
    finally:
        run_logger.close()


# --- sweep ---

def _record_finished(
    futures: Dict[Future, int],
    rows: List[Optional[dict]],
    record: Callable[[int, Tuple[ScenarioSummary, float]], None],
) -> None:
    """Record every job that finished cleanly but was not collected yet."""
    for future, index in futures.items():
        if rows[index] is None and future.done() and not future.cancelled() and future.exception() is None:
            record(index, future.result())


def _sweep_job(plan: GatePlan, cfg: IntegratorConfig, name: str, seedless: bool) -> Tuple[ScenarioSummary, float]:
    start = time.perf_counter()
    guard = forbid_randomness() if seedless else contextlib.nullcontext()
    with guard:
        _, summary = run_scenario(plan, cfg=cfg, name=name)
    return summary, time.perf_counter() - start


@_exit_code
def cmd_sweep(
    config_path: Optional[str] = None,
    out: Optional[str] = None,
    jobs: Optional[int] = None,
    scenario: Optional[str] = None,
    seedless: bool = False,
) -> int:
    config = load_config(config_path, scenario)
    if config.sweep is None:
        raise ConfigurationError("sweep needs sweep.parameter and sweep.values", key="sweep")
    out_dir = _output_dir(config, out)
    jobs = jobs or config.parallel_jobs
    values = list(config.sweep.values)
    plans = [config.resolve_plan(value) for value in values]
    names = [f"{config.name}[{config.sweep.parameter}={reports.format_value(v)}]" for v in values]
    run_logger = RunLogger(log_dir=out_dir)
    run_logger.sweep("Starting sweep", {"parameter": config.sweep.parameter, "points": len(plans), "jobs": jobs})

    rows: List[Optional[dict]] = [None] * len(plans)
    summaries: List[Optional[ScenarioSummary]] = [None] * len(plans)

    def record(index: int, result: Tuple[ScenarioSummary, float]) -> None:
        summary, runtime = result
        summaries[index] = summary
        rows[index] = reports.sweep_row(values[index], summary, runtime)

    try:
        if jobs <= 1:
            for index, plan in enumerate(tqdm(plans, desc="sweep")):
                record(index, _sweep_job(plan, config.integrator, names[index], seedless))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures: Dict[Future, int] = {
                    pool.submit(_sweep_job, plan, config.integrator, names[i], seedless): i for i, plan in enumerate(plans)
                }
                try:
                    for future in tqdm(as_completed(futures), total=len(futures), desc="sweep"):
                        record(futures[future], future.result())
                except BaseException:
                    pool.shutdown(wait=False, cancel_futures=True)
                    _record_finished(futures, rows, record)
                    raise
    except Exception as exc:
        done = [row for row in rows if row is not None]
        reports.write_sweep(done, out_dir / "sweep.csv")
        run_logger.error("Sweep aborted", {"completed": len(done), "error": type(exc).__name__, "message": str(exc)})
        raise
    finally:
        run_logger.close()

    reports.write_sweep(rows, out_dir / "sweep.csv")
    if config.sweep.parameter == "plan.enabled_terms":
        table = infidelity_decomposition(summaries)
        reports.write_decomposition(table, out_dir / "decomposition.csv")
    logger.info("Sweep finished", points=len(rows), out=out_dir)
    print(f"sweep over {config.sweep.parameter}: {len(rows)} points -> {out_dir / 'sweep.csv'}")
    return 0


# --- validate ---

@_exit_code
def cmd_validate(config_path: Optional[str] = None, scenario: Optional[str] = None) -> int:
    """Print the frequency hierarchy and the approximation bounds. Advisory: warnings do not fail."""
    config = load_config(config_path, scenario)
    plan = config.resolve_plan()
    p = plan.params
    run_logger = RunLogger(name="gate_sim.validate")

    print("frequency hierarchy (eps/4 << Omega_r/4 << nu ~ Omega << 4 omega0):")
    for link in p.hierarchy():
        print(f"  {link.name:<22} ratio {link.ratio:>12.4g}  {link.status}")
    print("approximation bounds:")
    for name, value in rwa_bounds(p).items():
        print(f"  {name:<22} {value:.4g}")
    print("trap geometry:")
    print(f"  ion spacing            {ion_spacing(p) * 1e6:.4g} um")
    print(f"  addressing splitting   {to_hz(addressing_splitting(p)) / 1e6:.4g} MHz (2pi)")
    print(f"  Lamb-Dicke parameter   {lamb_dicke_parameter(p):.4g} (configured eta {p.eta:.4g})")

    warnings = p.hierarchy_warnings()
    run_logger.validate("Hierarchy checked", {"scenario": config.name, "warnings": warnings or "none"})
    run_logger.close()
    return 0
