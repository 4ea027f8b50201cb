import math

import numpy as np
import pytest

from models.operator import PAULI_MATRICES, PauliString, SiteLayout
from models.zeno import Channel, SimulationTask, ZenoGadgetSpec
from utils.errors import ConfigError
from utils.fitting import fit_slope
from utils.sampling import random_density

X, Y, Z, I2 = PAULI_MATRICES["X"], PAULI_MATRICES["Y"], PAULI_MATRICES["Z"], np.eye(2)

ZII, IZI, IIZ = (PauliString.from_label(label) for label in ("ZII", "IZI", "IIZ"))
PLUS3 = np.ones(8) / math.sqrt(8)


def kron(*ops):
    result = np.ones((1, 1))
    for op in ops:
        result = np.kron(result, op)
    return result


def test_effective_hamiltonian_of_z_spec_is_zzz(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -6)
    np.testing.assert_allclose(zeno.effective_hamiltonian(spec).matrix, kron(Z, Z, Z), atol=1e-10)


def test_effective_hamiltonian_of_mixed_paulis(zeno):
    A, B, C = (PauliString.from_label(label) for label in ("XII", "IYI", "IIZ"))
    spec = zeno.pauli_zeno_spec(A, B, C, 2.0 ** -5)
    np.testing.assert_allclose(zeno.effective_hamiltonian(spec).matrix, kron(X, Y, Z), atol=1e-10)


def test_spec_ratios_recorded(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -4)
    assert spec.omega == pytest.approx(2 * math.pi * 16)
    assert spec.ratios["H_P1/omega"] == pytest.approx(1.0)
    assert spec.ratios["H_X/sqrt(omega)"] == pytest.approx(math.sqrt(2.0))


def test_zeno_hamiltonian_layout(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -4)
    H_prime = zeno.zeno_local_hamiltonian(spec)
    assert H_prime.layout == SiteLayout.qubits(4)
    assert H_prime.locality == 2
    assert zeno.zeno_hamiltonian(spec).dim == 16


def test_spec_rejects_anticommuting_strings(zeno):
    with pytest.raises(ConfigError):
        zeno.pauli_zeno_spec(PauliString.from_label("XII"), ZII, IIZ, 0.1)


def test_spec_rejects_bad_coefficients_and_step(zeno):
    with pytest.raises(ConfigError):
        zeno.pauli_zeno_spec(PauliString.from_label("ZII", 2.0), IZI, IIZ, 0.1)
    with pytest.raises(ConfigError):
        zeno.pauli_zeno_spec(ZII, IZI, IIZ, 0.0)


def test_spec_rejects_wrong_h_p1_square(zeno, hamiltonians):
    H_I = hamiltonians.from_pauli_strings([PauliString(1.0, {0: "Z"}, 1)], 1)
    H_P1 = hamiltonians.from_pauli_strings([PauliString(3.0, {0: "Z"}, 1)], 1)
    with pytest.raises(ConfigError):
        zeno.check_spec(ZenoGadgetSpec(H_I, H_I, H_P1, 1.0))


def test_step_amplitude_slopes(zeno):
    delta_ts = [2.0 ** -e for e in range(4, 11)]
    table = zeno.step_sweep(ZII, IZI, IIZ, delta_ts, PLUS3)
    assert list(table["n_sites"].unique()) == [3]
    err0 = fit_slope(table["delta_t"], table["err0"])
    amp1 = fit_slope(table["delta_t"], table["amp1"])
    assert 1.85 <= err0.slope <= 2.15
    assert 1.35 <= amp1.slope <= 1.65


def padded_z_strings(n):
    return [PauliString.from_label(label + "I" * (n - 3)) for label in ("ZII", "IZI", "IIZ")]


def plus_state(n):
    return np.ones(2 ** n) / math.sqrt(2 ** n)


@pytest.mark.parametrize("n", [3, 5])
def test_step_amplitude_slopes_with_bystander_chain(zeno, hamiltonians, n):
    A, B, C = padded_z_strings(n)
    chain = hamiltonians.pauli_chain(n, zz=1.0, x=1.0)
    delta_ts = [2.0 ** -e for e in range(4, 11)]
    table = zeno.step_sweep(A, B, C, delta_ts, plus_state(n), chain)
    err0 = fit_slope(table["delta_t"], table["err0"])
    amp1 = fit_slope(table["delta_t"], table["amp1"])
    assert 1.85 <= err0.slope <= 2.15
    assert 1.35 <= amp1.slope <= 1.65


def test_step_error_does_not_grow_with_system_size(zeno, hamiltonians):
    errors = []
    for n in range(3, 9):
        spec = zeno.pauli_zeno_spec(*padded_z_strings(n), 2.0 ** -6)
        chain = hamiltonians.pauli_chain(n, zz=1.0, x=1.0)
        errors.append(zeno.step_amplitudes(spec, plus_state(n), chain)["err0"])
    assert max(errors) / min(errors) < 2.0


def test_step_amplitudes_accept_density_operator(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -6)
    pure = zeno.step_amplitudes(spec, PLUS3)
    mixed = zeno.step_amplitudes(spec, np.outer(PLUS3, PLUS3))
    assert mixed["amp1"] == pytest.approx(pure["amp1"], rel=1e-6)


def test_step_amplitudes_rejects_unnormalized_state(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -6)
    with pytest.raises(ConfigError):
        zeno.step_amplitudes(spec, 2 * PLUS3)


def test_bystander_must_share_target_layout(zeno, hamiltonians):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -6)
    with pytest.raises(ConfigError):
        zeno.step_amplitudes(spec, PLUS3, hamiltonians.pauli_chain(4, zz=1.0, x=1.0))


def test_dephasing_is_idempotent_and_trace_preserving(zeno, rng):
    rho = random_density(rng, 8)
    once = zeno.dephase(rho)
    np.testing.assert_allclose(zeno.dephase(once), once)
    assert np.trace(once).real == pytest.approx(1.0)
    # Off-diagonal ancilla blocks vanish
    np.testing.assert_allclose(once.reshape(4, 2, 4, 2)[:, 0, :, 1], 0.0)


def test_simulation_tracks_target_dynamics(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -7)
    task = SimulationTask([], [kron(X, I2, I2)], 0.5, 0.2, ["XII"])
    trajectory = zeno.simulate_zeno(spec, None, PLUS3, task)
    assert list(trajectory.columns) == ["t", "obs_label", "expectation", "exact", "obs_error", "leak_prob"]
    assert len(trajectory) == 64
    assert (trajectory["leak_prob"] >= -1e-12).all()
    assert zeno.simulation_within_target(trajectory, task)["holds"]


def test_simulation_error_halves_with_step(zeno):
    task = SimulationTask([], [kron(X, I2, I2)], 1.0, 0.5, ["XII"])
    errors = []
    for exponent in (5, 6, 7):
        spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -exponent)
        errors.append(zeno.simulate_zeno(spec, None, PLUS3, task).iloc[-1]["obs_error"])
    for coarse, fine in zip(errors, errors[1:]):
        assert 1.6 <= coarse / fine <= 2.6


def test_leak_probability_scales_with_step_squared(zeno):
    task = SimulationTask([], [kron(X, I2, I2)], 1.0, 0.5, ["XII"])
    delta_ts, leaks = [], []
    for exponent in (5, 6, 7, 8):
        spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -exponent)
        delta_ts.append(spec.delta_t)
        leaks.append(zeno.simulate_zeno(spec, None, PLUS3, task).iloc[-1]["leak_prob"])
    fit = fit_slope(delta_ts, leaks)
    assert 1.8 <= fit.slope <= 2.2


def test_simulation_rejects_short_horizon(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 0.5)
    task = SimulationTask([], [kron(Z, I2, I2)], 0.1, 0.1)
    with pytest.raises(ConfigError):
        zeno.simulate_zeno(spec, None, PLUS3, task)


def test_task_normalizes_observables():
    task = SimulationTask([], [3 * kron(Z, I2)], 1.0, 0.1)
    assert np.linalg.norm(task.observables[0], 2) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        SimulationTask([], [np.zeros((2, 2))], 1.0, 0.1)


def test_block_generator_approaches_effective_hamiltonian(zeno):
    spec = zeno.pauli_zeno_spec(ZII, IZI, IIZ, 2.0 ** -8)
    generator = zeno.block_generator(spec)
    gap = np.linalg.norm(generator - zeno.effective_hamiltonian(spec).matrix, 2)
    assert gap < 0.1


def test_trotter_error_matches_quadrature(zeno):
    report = zeno.trotter_error(-1j * X, -1j * Z, 0.3, cross_check=True)
    assert report["value"] > 0.0
    assert report["quadrature_gap"] < 1e-8
    assert report["quadrature"] == pytest.approx(report["value"], rel=1e-6)


def test_trotter_error_of_commuting_generators(zeno):
    report = zeno.trotter_error(-1j * Z, -2j * Z, 1.0)
    assert report["value"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ConfigError):
        zeno.trotter_error(Z, X, 1.0)


def test_conjugation_drift_short_time(zeno, hamiltonians):
    H = hamiltonians.pauli_chain(5, zz=1.0, x=0.0)
    report = zeno.conjugation_drift(H, X, [2], 0.01)
    # ||[H, X_2]|| = 4 for two ZZ bonds through site 2
    assert report["ratio"] == pytest.approx(4.0, rel=5e-2)
    assert report["value"] <= report["bound"]


def test_noisy_error_budget(zeno):
    assert zeno.noisy_error_budget(0.1, 0.01, 0.02, 0.03) == pytest.approx(0.16)
    with pytest.raises(ConfigError):
        zeno.noisy_error_budget(0.1, -0.01, 0.0, 0.0)


def test_depolarizing_distance_estimate(zeno, rng):
    p = 0.2
    identity = Channel.unitary_conjugation(np.eye(2))
    estimate = zeno.estimate_one_to_one_distance(identity, Channel.depolarizing(p), 2, rng, samples=50)
    assert p / 2 <= estimate <= 2 * p


def test_channel_validation():
    with pytest.raises(ConfigError):
        Channel.depolarizing(1.5)
    with pytest.raises(ConfigError):
        Channel(Channel.UNITARY)
    with pytest.raises(ConfigError):
        Channel.composition()
