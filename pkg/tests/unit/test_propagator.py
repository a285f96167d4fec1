# tests/unit/test_propagator.py

import math

import numpy as np
import pytest
from scipy.linalg import expm

from core.exceptions import ArgumentError, ConfigurationError, IntegrationError, NormDriftError
from core.schedule import build_schedule
from models.hilbert import SpaceShape, StateVector
from models.operators import double_dressed_pauli, fock_amplitudes, pauli, product_state
from schemas.plan import IntegratorConfig, PulseEvent, PulseSchedule
from services.analysis import collective_phase
from services.corrections import effective_hamiltonian, shift_coefficient
from services.hamiltonians import dressed_frame_hamiltonian
from services.harmonics import Frame, HamiltonianModel, Term
from services.magnus import analytic_propagator
from services.propagator import evolve, pi_pulse, resolve_step

pytestmark = pytest.mark.unit

TAU = 2e-4


@pytest.fixture
def plus_state(single_shape):
    return StateVector(single_shape, np.kron(np.array([1.0, 1.0]) / math.sqrt(2), fock_amplitudes(0, 4)))


def _bias_model(shape, strength, sign_power=0):
    term = Term.static("bias", strength * pauli("z", 0, shape), sign_power=sign_power)
    return HamiltonianModel(shape, (term,), Frame.DOUBLE_DRESSED, omega_r=1.0)


# --- Exact cases ---

def test_empty_model_leaves_state_alone(small_shape):
    model = HamiltonianModel(small_shape, (), Frame.DOUBLE_DRESSED)
    psi0 = product_state(small_shape, "du", 1)
    trajectory = evolve(model, psi0, 1e-3, IntegratorConfig(output_samples=5))
    assert len(trajectory) == 5
    assert trajectory.times[-1] == pytest.approx(1e-3)
    assert abs(trajectory.final_state.overlap(psi0)) == pytest.approx(1.0)


def test_static_model_matches_matrix_exponential(single_shape, plus_state):
    model = _bias_model(single_shape, 0.3)
    trajectory = evolve(model, plus_state, 10.0, IntegratorConfig(output_samples=11))
    expected = expm(-1j * 10.0 * model.matrix(0.0)) @ plus_state.amplitudes
    assert np.allclose(trajectory.final_state.amplitudes, expected, atol=1e-10)


def test_gate_term_follows_closed_form(reference_params, pair_shape, coarse_integrator):
    model = dressed_frame_hamiltonian(reference_params, pair_shape, {"gate"})
    psi0 = product_state(pair_shape, "dd")
    trajectory = evolve(model, psi0, TAU, coarse_integrator)
    for index in (5, 10, 20):
        t = trajectory.times[index]
        expected = analytic_propagator(reference_params, pair_shape, t).apply(psi0)
        assert np.allclose(trajectory.states[index].amplitudes, expected.amplitudes, atol=1e-6)
    assert trajectory.final("fidelity") == pytest.approx(1.0, abs=1e-6)
    assert trajectory.observable("mean_phonons")[10] == pytest.approx(0.5, rel=1e-4)


def test_sector_eigenstate_is_displaced_by_a_full_loop(reference_params, pair_shape, coarse_integrator,
                                                       sector_eigenstate):
    model = dressed_frame_hamiltonian(reference_params, pair_shape, {"gate"})
    trajectory = evolve(model, sector_eigenstate(pair_shape), TAU, coarse_integrator)
    phonons = trajectory.observable("mean_phonons")
    assert phonons[10] == pytest.approx(1.0 / reference_params.K, rel=1e-4)
    assert phonons[-1] < 1e-6


def test_midpoint_stepper_agrees_with_closed_form(reference_params, pair_shape):
    model = dressed_frame_hamiltonian(reference_params, pair_shape, {"gate"})
    psi0 = product_state(pair_shape, "dd")
    cfg = IntegratorConfig(method="stepwise_exponential", output_samples=3, step_factor=400)
    final = evolve(model, psi0, TAU, cfg).final_state
    expected = analytic_propagator(reference_params, pair_shape, TAU).apply(psi0)
    assert abs(final.overlap(expected)) == pytest.approx(1.0, abs=1e-4)


def test_rk4_agrees_with_magnus_for_small_steps(reference_params, small_shape):
    model = dressed_frame_hamiltonian(reference_params, small_shape, {"gate"})
    psi0 = product_state(small_shape, "dd")
    rk4 = evolve(model, psi0, TAU / 4, IntegratorConfig(method="rk4", max_step=1e-7, output_samples=3))
    magnus = evolve(model, psi0, TAU / 4, IntegratorConfig(output_samples=3))
    assert np.allclose(rk4.final_state.amplitudes, magnus.final_state.amplitudes, atol=1e-7)


# --- Step size ---

def test_explicit_step_must_resolve_fastest_harmonic(reference_params, small_shape):
    model = dressed_frame_hamiltonian(reference_params, small_shape, {"gate"})
    with pytest.raises(ConfigurationError) as excinfo:
        resolve_step(model, TAU, IntegratorConfig(max_step=1e-5))
    assert excinfo.value.key == "integrator.max_step"
    assert "f_max" in str(excinfo.value)
    assert resolve_step(model, TAU, IntegratorConfig(max_step=1e-6)) == 1e-6


def test_derived_step_shrinks_with_faster_terms(reference_params, small_shape):
    slow = dressed_frame_hamiltonian(reference_params, small_shape, {"gate"})
    fast = dressed_frame_hamiltonian(reference_params, small_shape, {"gate", "fast_rf"})
    cfg = IntegratorConfig()
    assert resolve_step(fast, TAU, cfg) < resolve_step(slow, TAU, cfg)
    assert resolve_step(fast, TAU, cfg) <= 2 * math.pi / (cfg.step_factor * fast.max_frequency())


# --- Schedule events ---

def test_pi_pulse_about_x_exchanges_both_spins(small_shape):
    flipped = pi_pulse(small_shape, "x").apply(product_state(small_shape, "dd"))
    assert abs(flipped.overlap(product_state(small_shape, "uu"))) == pytest.approx(1.0)
    assert pi_pulse(small_shape, "z").is_unitary()


def test_pi_pulse_is_applied_before_recording(small_shape):
    model = HamiltonianModel(small_shape, (), Frame.DOUBLE_DRESSED)
    schedule = PulseSchedule(events=(PulseEvent(time=0.5, kind="pi_pulse", axis="x"),))
    trajectory = evolve(model, product_state(small_shape, "dd"), 1.0, IntegratorConfig(output_samples=5), schedule)
    assert trajectory.observable("p_dd")[1] == pytest.approx(1.0)
    assert trajectory.observable("p_uu")[2] == pytest.approx(1.0)
    assert trajectory.final("p_uu") == pytest.approx(1.0)


def test_sign_flip_undoes_sign_following_rotation(single_shape, plus_state):
    model = _bias_model(single_shape, 0.3, sign_power=1)
    cfg = IntegratorConfig(output_samples=3)
    echoed = evolve(model, plus_state, 10.0, cfg, PulseSchedule(events=(PulseEvent(time=4.0, kind="rf_phase_flip"),
                                                                         PulseEvent(time=6.0, kind="rf_phase_flip"))))
    assert abs(echoed.final_state.overlap(plus_state)) < 0.99

    refocused = evolve(model, plus_state, 10.0, cfg, PulseSchedule(events=(PulseEvent(time=5.0, kind="rf_phase_flip"),)))
    assert abs(refocused.final_state.overlap(plus_state)) == pytest.approx(1.0, abs=1e-10)


def test_single_flip_refocuses_first_order_shift_during_gate(reference_params, pair_shape, coarse_integrator):
    """The fast-RF Stark shift c s(t) sum sigma_z rides along the gate; one mid-gate flip cancels it."""
    averaged = dressed_frame_hamiltonian(reference_params, SpaceShape(2, 2), {"fast_rf"})
    direction = double_dressed_pauli("z", 0, SpaceShape(2, 2)) + double_dressed_pauli("z", 1, SpaceShape(2, 2))
    shift = shift_coefficient(effective_hamiltonian(averaged, sign=1), direction)
    assert shift < 0

    spin_sum = double_dressed_pauli("z", 0, pair_shape) + double_dressed_pauli("z", 1, pair_shape)
    stark = HamiltonianModel(pair_shape, (Term.static("stark", shift * spin_sum, sign_power=1),),
                             Frame.DOUBLE_DRESSED, reference_params.omega_r)
    model = dressed_frame_hamiltonian(reference_params, pair_shape, {"gate"}).plus(stark)
    psi0 = product_state(pair_shape, "dd")

    unflipped = evolve(model, psi0, TAU, coarse_integrator, build_schedule(0, TAU)).final_state
    flipped = evolve(model, psi0, TAU, coarse_integrator, build_schedule(1, TAU)).final_state

    assert collective_phase(unflipped) == pytest.approx(2 * shift * TAU, rel=1e-3)
    assert abs(collective_phase(flipped)) < 1e-3
    ideal = analytic_propagator(reference_params, pair_shape, TAU).apply(psi0)
    assert abs(flipped.overlap(ideal)) == pytest.approx(1.0, abs=1e-6)
    assert abs(unflipped.overlap(ideal)) < abs(flipped.overlap(ideal))


def test_event_after_final_time_is_rejected(single_shape, plus_state):
    model = _bias_model(single_shape, 0.3)
    schedule = PulseSchedule(events=(PulseEvent(time=2.0, kind="rf_phase_flip"),))
    with pytest.raises(ArgumentError):
        evolve(model, plus_state, 1.0, IntegratorConfig(output_samples=3), schedule)


# --- Failures ---

def test_norm_drift_is_reported(mocker, single_shape, plus_state):
    mocker.patch.dict("services.propagator.STEPPERS", {"magnus4": lambda model, psi, t, dt, sign, theta: 1.01 * psi})
    with pytest.raises(NormDriftError) as excinfo:
        evolve(_bias_model(single_shape, 0.3), plus_state, 1.0, IntegratorConfig(method="magnus4", output_samples=3))
    assert excinfo.value.drift > 1e-3
    assert excinfo.value.time > 0


def test_non_finite_state_is_an_integration_error(mocker, single_shape, plus_state):
    mocker.patch.dict("services.propagator.STEPPERS", {"magnus4": lambda model, psi, t, dt, sign, theta: psi * np.nan})
    with pytest.raises(IntegrationError):
        evolve(_bias_model(single_shape, 0.3), plus_state, 1.0, IntegratorConfig(method="magnus4", output_samples=3))


def test_bad_inputs_are_rejected(single_shape, small_shape, plus_state):
    model = _bias_model(single_shape, 0.3)
    with pytest.raises(ArgumentError):
        evolve(model, StateVector(single_shape, 2 * plus_state.amplitudes), 1.0)
    with pytest.raises(ArgumentError):
        evolve(model, plus_state, 0.0)
    with pytest.raises(ArgumentError):
        evolve(model, product_state(small_shape, "dd"), 1.0)
