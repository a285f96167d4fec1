# tests/unit/test_analysis.py

import math

import numpy as np
import pytest
from scipy.linalg import expm

from core.exceptions import ArgumentError
from models.hilbert import SpaceShape, StateVector
from models.operators import (
    bell_spin_vector,
    bell_state,
    coherent_state,
    double_dressed_pauli,
    fock_amplitudes,
    product_state,
    spin_vector,
)
from models.trajectory import TRAJECTORY_COLUMNS
from schemas.results import ScenarioSummary
from services.analysis import (
    DECOMPOSITION_COLUMNS,
    bell_fidelity,
    collective_phase,
    infidelity_decomposition,
    mean_phonons,
    observables,
    phonon_distribution,
    purity,
    tabulate,
    top_level_population,
)

pytestmark = pytest.mark.unit


def _spin_state(shape, spin_amplitudes, phonons=0):
    return StateVector(shape, np.kron(spin_amplitudes, fock_amplitudes(phonons, shape.phonon_cutoff)))


# --- Fidelity ---

def test_bell_fidelity_of_target_and_product_states(small_shape):
    assert bell_fidelity(_spin_state(small_shape, bell_spin_vector())) == pytest.approx(1.0)
    assert bell_fidelity(product_state(small_shape, "dd")) == pytest.approx(0.5)
    assert bell_fidelity(product_state(small_shape, "ud")) == pytest.approx(0.0)


def test_bell_fidelity_of_orthogonal_bell_state(small_shape):
    orthogonal = (spin_vector("dd") - 1j * spin_vector("uu")) / math.sqrt(2)
    assert bell_fidelity(_spin_state(small_shape, orthogonal)) == pytest.approx(0.0, abs=1e-15)


def test_bell_fidelity_ignores_global_phase_and_phonon_state(small_shape):
    state = _spin_state(small_shape, bell_spin_vector(), phonons=2).with_phase(0.7)
    assert bell_fidelity(state) == pytest.approx(1.0)


def test_bell_fidelity_needs_two_ions():
    with pytest.raises(ArgumentError):
        bell_fidelity(product_state(SpaceShape(1, 4), "d"))


@pytest.mark.parametrize("beta", [0.0, 0.21, -0.37])
def test_collective_phase_recovers_the_sigma_z_rotation(small_shape, beta):
    spin_sum = double_dressed_pauli("z", 0, small_shape) + double_dressed_pauli("z", 1, small_shape)
    rotated = expm(-0.5j * beta * spin_sum.matrix) @ bell_state(small_shape).amplitudes
    assert collective_phase(StateVector(small_shape, rotated)) == pytest.approx(beta, abs=1e-6)


def test_collective_phase_needs_two_ions():
    with pytest.raises(ArgumentError):
        collective_phase(product_state(SpaceShape(1, 4), "d"))


# --- Motion ---

def test_mean_phonons_of_fock_and_coherent_states():
    shape = SpaceShape(2, 30)
    assert mean_phonons(product_state(shape, "dd", 3)) == pytest.approx(3.0)
    assert mean_phonons(coherent_state(1.0, shape)) == pytest.approx(1.0, abs=1e-6)


def test_phonon_distribution_sums_to_one(small_shape):
    distribution = phonon_distribution(product_state(small_shape, "du", 1))
    assert distribution.sum() == pytest.approx(1.0)
    assert distribution[1] == pytest.approx(1.0)
    assert top_level_population(product_state(small_shape, "dd", 3)) == pytest.approx(1.0)


def test_purity_detects_spin_motion_entanglement(small_shape):
    assert purity(product_state(small_shape, "dd", 2)) == pytest.approx(1.0)
    entangled = (
        np.kron(spin_vector("dd"), fock_amplitudes(0, 4)) + np.kron(spin_vector("uu"), fock_amplitudes(1, 4))
    ) / math.sqrt(2)
    assert purity(StateVector(small_shape, entangled)) == pytest.approx(0.5)


# --- Tables ---

def test_observables_row(small_shape):
    row = observables(_spin_state(small_shape, bell_spin_vector()))
    assert tuple(row) == TRAJECTORY_COLUMNS
    assert row["p_dd"] == pytest.approx(0.5)
    assert row["p_uu"] == pytest.approx(0.5)
    # rho_dd,uu = (1/sqrt2)(-i/sqrt2)
    assert row["re_rho_dd_uu"] == pytest.approx(0.0, abs=1e-15)
    assert row["im_rho_dd_uu"] == pytest.approx(-0.5)


def test_observables_for_one_ion_leave_spin_columns_empty():
    row = observables(product_state(SpaceShape(1, 4), "u", 1))
    assert math.isnan(row["fidelity"])
    assert row["mean_phonons"] == pytest.approx(1.0)


def test_tabulate_builds_columns(small_shape):
    states = [product_state(small_shape, "dd", n) for n in range(3)]
    table = tabulate(states)
    assert set(table) == set(TRAJECTORY_COLUMNS)
    assert np.allclose(table["mean_phonons"], [0.0, 1.0, 2.0])


# --- Infidelity decomposition ---

def _summary(terms, fidelity):
    return ScenarioSummary(
        scenario="+".join(sorted(terms)) or "empty",
        final_fidelity=fidelity,
        peak_mean_phonons=1.0,
        final_mean_phonons=0.0,
        final_purity=1.0,
        enabled_terms=tuple(sorted(terms)),
        n_phase_flips=1,
        schedule="none",
        K=1,
        gate_time=2e-4,
        phonon_cutoff=16,
        method="magnus4",
        max_step=1e-8,
        params={},
    )


def test_decomposition_attributes_missing_terms():
    runs = [
        _summary({"gate", "crosstalk", "fast_rf"}, 0.995),
        _summary({"gate", "fast_rf"}, 0.9985),
        _summary({"gate", "crosstalk"}, 0.9955),
        _summary({"gate"}, 0.99995),
    ]
    table = infidelity_decomposition(runs)
    assert tuple(table.columns) == DECOMPOSITION_COLUMNS
    rows = table.set_index("term")["attribution"]
    assert rows["crosstalk"] == pytest.approx(0.0035)
    assert rows["fast_rf"] == pytest.approx(0.0005)
    assert rows["crosstalk,fast_rf"] == pytest.approx(0.00495)
    assert rows["residual"] == pytest.approx(0.00495 - 0.0035 - 0.0005)


def test_decomposition_of_identical_runs_is_zero():
    runs = [_summary({"gate", "crosstalk"}, 0.99), _summary({"gate", "crosstalk"}, 0.99)]
    table = infidelity_decomposition(runs)
    assert np.allclose(table["attribution"], 0.0)
    assert list(table["term"]) == ["none", "residual"]


def test_decomposition_rejects_runs_outside_the_reference():
    runs = [_summary({"gate", "crosstalk"}, 0.99), _summary({"gate", "fast_rf"}, 0.995)]
    with pytest.raises(ArgumentError):
        infidelity_decomposition(runs)
    with pytest.raises(ArgumentError):
        infidelity_decomposition([])
