"""
Zeno controller for the gadget toolkit.
Handles the measurement-based gadget: Hamiltonian builders, effective
Hamiltonian, evolve-then-dephase simulation, per-step amplitudes and the
error tools used to analyse them.
"""
import logging
import math

import numpy as np
import pandas as pd
from scipy import integrate, linalg

from controllers.gadget_controller import KET0, KET1, PAULI_X, block
from controllers.operator_controller import as_array
from models.hamiltonian import LocalHamiltonian, LocalTerm
from models.operator import DenseOperator, PauliString
from models.zeno import Channel, ZenoGadgetSpec
from utils.errors import ConfigError, GadgetLabError, NumericalError
from utils.sampling import random_state

logger = logging.getLogger(__name__)


class ZenoController:
    """
    Controller for Zeno gadgets and their dynamics.
    """

    def __init__(self, settings, operator_controller, hamiltonian_controller):
        """
        Initialize the Zeno controller.

        Args:
            settings: Settings instance
            operator_controller: OperatorController instance
            hamiltonian_controller: HamiltonianController instance
        """
        self.settings = settings
        self.operators = operator_controller
        self.hamiltonians = hamiltonian_controller

    def check_spec(self, spec):
        """
        Validate H_P1^2 = omega^2 I and record the norm ratios.

        H_P1 = 0 is accepted as the decoupled-ancilla case.
        """
        H_P1 = self.hamiltonians.assemble_matrix(spec.H_P1)
        omega = spec.omega
        if np.any(H_P1):
            residual = self.operators.op_norm(H_P1 @ H_P1 - omega ** 2 * np.eye(H_P1.shape[0]))
            if residual > 1e-8 * omega ** 2:
                raise ConfigError(f"H_P1^2 differs from omega^2 I by {residual:.3e}")
        spec.ratios = {
            "H_I": self.operators.op_norm(self.hamiltonians.assemble_matrix(spec.H_I)),
            "H_X/sqrt(omega)": self.operators.op_norm(self.hamiltonians.assemble_matrix(spec.H_X)) / math.sqrt(omega),
            "H_P1/omega": self.operators.op_norm(H_P1) / omega,
        }
        return spec

    def zeno_local_hamiltonian(self, spec):
        """
        H' as a local Hamiltonian with the ancilla as the last site.

        Args:
            spec: ZenoGadgetSpec

        Returns:
            LocalHamiltonian on the target layout plus one qubit
        """
        self.check_spec(spec)
        anc = spec.layout.n_sites
        layout = spec.layout.extended([2])
        layout.check_cap(self.settings.dim_cap)
        gadget = LocalHamiltonian(layout)
        for term in spec.H_I.terms:
            gadget.add_term(LocalTerm(term.operator, term.support, term.label))
        for term in spec.H_X.terms:
            gadget.add_term(LocalTerm(np.kron(term.operator.matrix, PAULI_X), term.support + (anc,),
                                      f"{term.label} X"))
        for term in spec.H_P1.terms:
            gadget.add_term(LocalTerm(np.kron(term.operator.matrix, KET1), term.support + (anc,),
                                      f"{term.label} |1><1|"))
        return gadget

    def zeno_hamiltonian(self, spec):
        """
        H' = H_I x I + H_X x X + H_P1 x |1><1| as a dense operator.
        """
        return self.hamiltonians.assemble(self.zeno_local_hamiltonian(spec))

    def effective_hamiltonian(self, spec):
        """
        H = H_I - omega^{-2} H_X H_P1 H_X.

        Args:
            spec: ZenoGadgetSpec

        Returns:
            Hermitian DenseOperator on the target space
        """
        self.check_spec(spec)
        H_I = self.hamiltonians.assemble_matrix(spec.H_I)
        H_X = self.hamiltonians.assemble_matrix(spec.H_X)
        H_P1 = self.hamiltonians.assemble_matrix(spec.H_P1)
        result = H_I - (H_X @ H_P1 @ H_X) / spec.omega ** 2
        if np.max(np.abs(result - result.conj().T), initial=0.0) > 1e-9 * max(1.0, spec.omega):
            raise NumericalError("Effective Hamiltonian lost Hermiticity")
        return DenseOperator((result + result.conj().T) / 2.0, hermitian=True)

    def pauli_zeno_spec(self, A, B, C, delta_t):
        """
        Zeno gadget for the product A B C of commuting Pauli strings.

        H_I = -A, H_X = sqrt(omega/2)(B + C), H_P1 = -omega A.

        Args:
            A: PauliString
            B: PauliString
            C: PauliString
            delta_t: Measurement interval

        Returns:
            ZenoGadgetSpec
        """
        strings = (A, B, C)
        n = A.n_sites
        for p in strings:
            if p.n_sites != n:
                raise ConfigError("Pauli strings must share the number of sites")
            if not np.isclose(abs(p.coefficient), 1.0) or not np.isclose(np.imag(p.coefficient), 0.0):
                raise ConfigError(f"Pauli coefficients must be +1 or -1, got {p.coefficient}")
        for first, second in ((A, B), (A, C), (B, C)):
            if not first.commutes_with(second):
                raise ConfigError(f"{first} and {second} do not commute")
        if not delta_t > 0:
            raise ConfigError(f"delta_t must be positive, got {delta_t}")

        omega = 2.0 * math.pi / delta_t
        scale = math.sqrt(omega / 2.0)

        def scaled(p, factor):
            return PauliString(factor * p.coefficient, dict(p.factors), n)

        H_I = self.hamiltonians.from_pauli_strings([scaled(A, -1.0)], n)
        H_X = self.hamiltonians.from_pauli_strings([scaled(B, scale), scaled(C, scale)], n)
        H_P1 = self.hamiltonians.from_pauli_strings([scaled(A, -omega)], n)
        return self.check_spec(ZenoGadgetSpec(H_I, H_X, H_P1, delta_t))

    def _else_matrix(self, spec, H_else):
        dim = spec.layout.total_dim
        if H_else is None:
            return np.zeros((dim, dim), dtype=complex)
        if H_else.layout != spec.layout:
            raise ConfigError("H_else must live on the target layout")
        return self.hamiltonians.assemble_matrix(H_else)

    def step_amplitudes(self, spec, psi, H_else=None):
        """
        One evolution step of length delta_t from psi x |0>.

        Args:
            spec: ZenoGadgetSpec
            psi: Normalized state vector (or density operator) on the target
            H_else: Optional LocalHamiltonian acting on the target only

        Returns:
            Dictionary with delta_t, err0 (error of the |0> component against
            e^{-i delta_t (H + H_else)} psi) and amp1 (weight of the |1> component)
        """
        psi = as_array(psi)
        E = self._else_matrix(spec, H_else)
        H_prime = self.hamiltonians.assemble_matrix(self.zeno_local_hamiltonian(spec))
        H_eff = self.effective_hamiltonian(spec).matrix
        step = self.operators.evolution_matrix(H_prime + np.kron(E, np.eye(2)), spec.delta_t)
        target = self.operators.evolution_matrix(H_eff + E, spec.delta_t)

        if psi.ndim == 1:
            if not np.isclose(np.linalg.norm(psi), 1.0, atol=1e-9):
                raise ConfigError("psi must be normalized")
            out = (step @ np.kron(psi, KET0[:, 0])).reshape(-1, 2)
            err0 = float(np.linalg.norm(out[:, 0] - target @ psi))
            amp1 = float(np.linalg.norm(out[:, 1]))
        else:
            rho = self._check_density(psi)
            out = step @ np.kron(rho, KET0) @ step.conj().T
            err0 = self.operators.trace_norm(block(out, 0, 0) - target @ rho @ target.conj().T)
            amp1 = math.sqrt(max(float(np.trace(block(out, 1, 1)).real), 0.0))
        return {"delta_t": spec.delta_t, "err0": err0, "amp1": amp1}

    def _check_density(self, rho):
        rho = self.operators.check_hermitian(rho, "rho")
        if not np.isclose(np.trace(rho).real, 1.0, atol=1e-9):
            raise ConfigError("rho must have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise ConfigError("rho must be positive semidefinite")
        return rho

    def dephase(self, rho_prime):
        """
        Measure the ancilla and forget the outcome.
        """
        return Channel.ancilla_dephasing().apply(rho_prime)

    def step_channel(self, spec, H_else=None, delta_t=None):
        """
        M o E_dt: unitary step under H' + H_else, then ancilla dephasing.
        """
        delta_t = spec.delta_t if delta_t is None else delta_t
        E = self._else_matrix(spec, H_else)
        H_prime = self.hamiltonians.assemble_matrix(self.zeno_local_hamiltonian(spec))
        U = self.operators.evolution_matrix(H_prime + np.kron(E, np.eye(2)), delta_t)
        return Channel.composition(Channel.unitary_conjugation(U), Channel.ancilla_dephasing())

    def simulate_zeno(self, spec, H_else, rho0, task, delta_t=None):
        """
        Repeated evolve-then-dephase steps against exact target evolution.

        Args:
            spec: ZenoGadgetSpec
            H_else: Optional LocalHamiltonian on the target
            rho0: Initial target state (vector or density operator)
            task: SimulationTask with observables and t_max
            delta_t: Step length (defaults to spec.delta_t)

        Returns:
            pandas DataFrame with columns t, obs_label, expectation, exact,
            obs_error, leak_prob
        """
        try:
            delta_t = spec.delta_t if delta_t is None else delta_t
            steps = int(math.floor(task.t_max / delta_t + 1e-9))
            if steps < 1:
                raise ConfigError(f"t_max = {task.t_max:g} is shorter than one step of {delta_t:g}")
            rho0 = as_array(rho0)
            if rho0.ndim == 1:
                rho0 = np.outer(rho0, rho0.conj())
            rho0 = self._check_density(rho0)

            channel = self.step_channel(spec, H_else, delta_t)
            H_target = self.effective_hamiltonian(spec).matrix + self._else_matrix(spec, H_else)
            target_step = self.operators.evolution_matrix(H_target, delta_t)
            ancilla_one = np.kron(np.eye(rho0.shape[0]), KET1)
            lifted = [np.kron(O, np.eye(2)) for O in task.observables]

            rho_prime = np.kron(rho0, KET0)
            rho_exact = rho0
            rows = []
            for k in range(1, steps + 1):
                rho_prime = channel.apply(rho_prime)
                rho_exact = target_step @ rho_exact @ target_step.conj().T
                leak = float(np.trace(ancilla_one @ rho_prime).real)
                for label, O, O_lifted in zip(task.labels, task.observables, lifted):
                    value = float(np.trace(O_lifted @ rho_prime).real)
                    exact = float(np.trace(O @ rho_exact).real)
                    rows.append({
                        "t": k * delta_t,
                        "obs_label": label,
                        "expectation": value,
                        "exact": exact,
                        "obs_error": abs(value - exact),
                        "leak_prob": leak,
                    })
            logger.debug("Zeno trajectory: %d steps of %g", steps, delta_t)
            return pd.DataFrame(rows)
        except GadgetLabError:
            raise
        except Exception as e:
            raise NumericalError(f"Error simulating Zeno dynamics: {str(e)}") from e

    def simulation_within_target(self, trajectory, task):
        """
        Whether the observable error stays within task.target_eps up to t_max.
        """
        window = trajectory[trajectory["t"] <= task.t_max + 1e-12]
        worst = float(window["obs_error"].max()) if not window.empty else 0.0
        return {"max_error": worst, "target_eps": task.target_eps, "holds": worst <= task.target_eps}

    def block_generator(self, spec, H_else=None):
        """
        i log(<0| e^{-i delta_t H'} |0>) / delta_t, the generator seen by the
        ancilla-0 block over one step.
        """
        E = self._else_matrix(spec, H_else)
        H_prime = self.hamiltonians.assemble_matrix(self.zeno_local_hamiltonian(spec))
        step = self.operators.evolution_matrix(H_prime + np.kron(E, np.eye(2)), spec.delta_t)
        generator = 1j * linalg.logm(block(step, 0, 0)) / spec.delta_t
        return (generator + generator.conj().T) / 2.0

    def step_sweep(self, A, B, C, delta_ts, psi, H_else=None):
        """
        step_amplitudes over a grid of delta_t, rebuilding the spec per point.

        Returns:
            pandas DataFrame with delta_t, err0, amp1, n_sites
        """
        rows = []
        for delta_t in delta_ts:
            spec = self.pauli_zeno_spec(A, B, C, delta_t)
            row = self.step_amplitudes(spec, psi, H_else)
            row["n_sites"] = spec.layout.n_sites
            rows.append(row)
        return pd.DataFrame(rows)

    def trotter_error(self, A, B, t, cross_check=False):
        """
        ||e^{tA} e^{tB} - e^{t(A+B)}|| for anti-Hermitian A and B.

        With cross_check, the difference is also integrated from
        int_0^t e^{(t-s)(A+B)} [e^{sA}, B] e^{sB} ds.

        Returns:
            Dictionary with value and, when requested, quadrature and their gap
        """
        A = as_array(A)
        B = as_array(B)
        for name, X in (("A", A), ("B", B)):
            if np.max(np.abs(X + X.conj().T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(X), initial=0.0)):
                raise ConfigError(f"{name} must be anti-Hermitian")
        direct = linalg.expm(t * A) @ linalg.expm(t * B) - linalg.expm(t * (A + B))
        report = {"value": self.operators.op_norm(direct)}
        if not cross_check:
            return report

        dim = A.shape[0]

        def integrand(s):
            e_sA = linalg.expm(s * A)
            inner = e_sA @ B - B @ e_sA
            value = linalg.expm((t - s) * (A + B)) @ inner @ linalg.expm(s * B)
            return np.concatenate([value.real.ravel(), value.imag.ravel()])

        flat, _ = integrate.quad_vec(integrand, 0.0, t, epsabs=1e-12, epsrel=1e-10)
        integral = (flat[: dim * dim] + 1j * flat[dim * dim:]).reshape(dim, dim)
        report["quadrature"] = self.operators.op_norm(integral)
        report["quadrature_gap"] = self.operators.op_norm(integral - direct)
        return report

    def conjugation_drift(self, H, A, support, t):
        """
        ||e^{itH} A e^{-itH} - A|| for an observable on a few sites.

        Args:
            H: LocalHamiltonian
            A: Operator on the ordered support
            support: Site indices of A
            t: Time

        Returns:
            Dictionary with value, ratio value / (||A|| t) and the bound 2||A||
        """
        A_full = self.hamiltonians.embed_term(A, support, H.layout)
        V = self.operators.evolution_matrix(self.hamiltonians.assemble_matrix(H), t)
        value = self.operators.op_norm(V.conj().T @ A_full @ V - A_full)
        norm_a = self.operators.op_norm(A)
        ratio = value / (norm_a * abs(t)) if t and norm_a else 0.0
        return {"value": value, "ratio": ratio, "bound": 2.0 * norm_a, "n_sites": H.n_sites}

    def noisy_error_budget(self, eps, d_state, d_evo, d_obs):
        """
        Error of a noisy simulator: eps + d_state + d_evo + d_obs.
        """
        for name, value in (("eps", eps), ("d_state", d_state), ("d_evo", d_evo), ("d_obs", d_obs)):
            if value < 0:
                raise ConfigError(f"{name} must be non-negative, got {value}")
        return eps + d_state + d_evo + d_obs

    def estimate_one_to_one_distance(self, channel_a, channel_b, dim, rng, samples=200):
        """
        Lower estimate of the 1->1 norm distance of two channels by maximizing
        the trace distance of their outputs over sampled pure states.
        """
        worst = 0.0
        for _ in range(samples):
            psi = random_state(rng, dim)
            rho = np.outer(psi, psi.conj())
            worst = max(worst, self.operators.trace_norm(channel_a.apply(rho) - channel_b.apply(rho)))
        return worst
