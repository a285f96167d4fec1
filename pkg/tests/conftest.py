# tests/conftest.py
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
import yaml

from models.hilbert import SpaceShape, StateVector
from models.operators import fock_amplitudes
from schemas.params import PhysicalParams
from schemas.plan import IntegratorConfig


# --- Test Fixtures ---

@pytest.fixture(scope="session")
def reference_params() -> PhysicalParams:
    """Reference parameters: nu = 2pi 500 kHz, Omega = 2pi 495 kHz, Omega_r = 2pi 99 kHz, eta = 0.01."""
    return PhysicalParams.reference()


@pytest.fixture(scope="session")
def pair_shape() -> SpaceShape:
    """Two ions with the default phonon cutoff."""
    return SpaceShape(2, 16)


@pytest.fixture(scope="session")
def small_shape() -> SpaceShape:
    return SpaceShape(2, 4)


@pytest.fixture(scope="session")
def single_shape() -> SpaceShape:
    return SpaceShape(1, 4)


@pytest.fixture(scope="session")
def sector_eigenstate() -> Callable[[SpaceShape], StateVector]:
    """Every ion in the +1 eigenstate of S_x: the sum of double-dressed sigma_z is -n_ions."""

    def _build(shape: SpaceShape) -> StateVector:
        spins = np.ones(1, dtype=complex)
        for _ in range(shape.n_ions):
            spins = np.kron(spins, np.array([1.0, 1.0]) / np.sqrt(2))
        return StateVector(shape, np.kron(spins, fock_amplitudes(0, shape.phonon_cutoff)))

    return _build


@pytest.fixture
def coarse_integrator() -> IntegratorConfig:
    """Default steps, few output samples: keeps the recorded trajectory small."""
    return IntegratorConfig(output_samples=21)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    """Write a flat YAML run configuration into tmp_path and return its path."""

    def _write(data: dict, name: str = "run.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
        return path

    return _write
