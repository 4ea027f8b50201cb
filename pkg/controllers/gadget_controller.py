"""
Gadget controller for the gadget toolkit.
Handles construction of perturbative gadgets, their verification against the
(eta, eps) and (Delta, eta, eps) definitions, the sampled gadget property,
parallel combination and the energy-scale bound.
"""
import logging
import math

import numpy as np
from scipy import stats

from controllers.operator_controller import as_array
from models.gadget import GadgetInstance, GadgetWitness
from models.hamiltonian import LocalHamiltonian, LocalTerm
from models.operator import PAULI_MATRICES, PauliString, SiteLayout
from utils.errors import (BlockConditionError, ConfigError, GadgetLabError, NumericalError,
                          RankMismatchError)

logger = logging.getLogger(__name__)

KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
PAULI_X = PAULI_MATRICES["X"]
SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)

PARALLEL_COMBINATION = "parallel-combination"


def block(V, a, b):
    """
    Ancilla block V_ab = (I x <a|) V (I x |b>) for one trailing ancilla qubit.

    Args:
        V: Operator on system x ancilla
        a: Row ancilla index (0 or 1)
        b: Column ancilla index (0 or 1)

    Returns:
        ndarray on the system space
    """
    matrix = as_array(V)
    half = matrix.shape[0] // 2
    return matrix.reshape(half, 2, half, 2)[:, a, :, b]


def _qubit_count(operator, name):
    dim = as_array(operator).shape[0]
    count = int(round(math.log2(dim))) if dim > 0 else 0
    if 2 ** count != dim or count < 1:
        raise ConfigError(f"{name} must act on whole qubits, got dimension {dim}")
    return count


class GadgetController:
    """
    Controller for gadget construction and verification.
    """

    def __init__(self, settings, operator_controller, hamiltonian_controller, rotation_controller):
        """
        Initialize the gadget controller.

        Args:
            settings: Settings instance
            operator_controller: OperatorController instance
            hamiltonian_controller: HamiltonianController instance
            rotation_controller: RotationController instance
        """
        self.settings = settings
        self.operators = operator_controller
        self.hamiltonians = hamiltonian_controller
        self.rotations = rotation_controller

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def _check_blocks_zero(self, named_blocks):
        failures = []
        for name, matrix in named_blocks:
            size = float(np.max(np.abs(matrix), initial=0.0))
            if size > self.settings.block_tol:
                failures.append(f"{name} (max entry {size:.3e})")
        if failures:
            raise BlockConditionError("Block condition(s) violated: " + ", ".join(failures))

    def _joint_hamiltonian(self, target, parts, delta):
        """
        H' = delta |1><1|_anc + sum of scaled joint-space operators.
        """
        n = target.n_sites
        layout = target.layout.extended([2])
        layout.check_cap(self.settings.dim_cap)
        gadget = LocalHamiltonian(layout)
        gadget.add_term(LocalTerm(delta * KET1, (n,), "Delta|1><1|"))
        for scale, matrix, label in parts:
            matrix = as_array(matrix)
            if matrix.shape != (layout.total_dim, layout.total_dim):
                raise ConfigError(f"{label} has dimension {matrix.shape[0]}, expected {layout.total_dim}")
            gadget.add_term(LocalTerm(scale * matrix, tuple(range(n + 1)), label))
        return gadget

    def _target_matrix_of(self, H):
        return self.hamiltonians.assemble_matrix(H)

    def first_order_gadget(self, H, V, delta):
        """
        H' = delta H_0 + V with H_0 = I x |1><1|.

        Args:
            H: Target LocalHamiltonian
            V: Hermitian operator on system x ancilla
            delta: Energy scale

        Returns:
            GadgetInstance with the residual ||H - V_00|| in diagnostics
        """
        target = self._target_matrix_of(H)
        residual = self.operators.op_norm(target - block(V, 0, 0))
        gadget = self._joint_hamiltonian(H, [(1.0, V, "V")], delta)
        logger.debug("First-order gadget at delta=%g, ||H - V00|| = %.3e", delta, residual)
        return GadgetInstance(H, gadget, [H.n_sites], GadgetInstance.FIRST_ORDER, delta,
                              diagnostics={"target_residual": residual})

    def second_order_gadget(self, H, V0, V1, delta):
        """
        H' = delta H_0 + delta^{1/2} V1 + V0.

        Requires V0_10 = V0_01 = V1_00 = 0.

        Returns:
            GadgetInstance with ||H - V0_00 + V1_01 V1_10|| in diagnostics
        """
        self._check_blocks_zero([
            ("V0_10", block(V0, 1, 0)),
            ("V0_01", block(V0, 0, 1)),
            ("V1_00", block(V1, 0, 0)),
        ])
        target = self._target_matrix_of(H)
        effective = block(V0, 0, 0) - block(V1, 0, 1) @ block(V1, 1, 0)
        residual = self.operators.op_norm(target - effective)
        gadget = self._joint_hamiltonian(H, [(math.sqrt(delta), V1, "V1"), (1.0, V0, "V0")], delta)
        return GadgetInstance(H, gadget, [H.n_sites], GadgetInstance.SECOND_ORDER, delta,
                              diagnostics={"target_residual": residual})

    def third_order_gadget(self, H, V0, V1, V2, delta):
        """
        H' = delta H_0 + delta^{2/3} V2 + delta^{1/3} V1 + V0.

        Requires V1_10 = V1_01 = V0_10 = V0_01 = 0, V2_00 = 0 and
        V1_00 = V2_01 V2_10.

        Returns:
            GadgetInstance with ||H - V0_00 - V2_01 V2_11 V2_10|| in diagnostics
        """
        self._check_blocks_zero([
            ("V1_10", block(V1, 1, 0)),
            ("V1_01", block(V1, 0, 1)),
            ("V0_10", block(V0, 1, 0)),
            ("V0_01", block(V0, 0, 1)),
            ("V2_00", block(V2, 0, 0)),
            ("V1_00 - V2_01 V2_10", block(V1, 0, 0) - block(V2, 0, 1) @ block(V2, 1, 0)),
        ])
        target = self._target_matrix_of(H)
        effective = block(V0, 0, 0) + block(V2, 0, 1) @ block(V2, 1, 1) @ block(V2, 1, 0)
        residual = self.operators.op_norm(target - effective)
        parts = [
            (delta ** (2.0 / 3.0), V2, "V2"),
            (delta ** (1.0 / 3.0), V1, "V1"),
            (1.0, V0, "V0"),
        ]
        gadget = self._joint_hamiltonian(H, parts, delta)
        return GadgetInstance(H, gadget, [H.n_sites], GadgetInstance.THIRD_ORDER, delta,
                              diagnostics={"target_residual": residual})

    def _product_target(self, operators, site_groups, n_sites):
        matrix = np.ones((1, 1), dtype=complex)
        for op in operators:
            matrix = np.kron(matrix, as_array(op))
        support = tuple(s for group in site_groups for s in group)
        H = LocalHamiltonian(SiteLayout.qubits(n_sites))
        H.add_term(LocalTerm(matrix, support, "target"))
        return H

    def subdivision_gadget(self, A, B, delta):
        """
        Subdivision gadget for H = A x B through one ancilla qubit.

        V1 = (1/sqrt2)(-A x I + I x B) x X and V0 = (1/2)(A^2 x I + I x B^2) x I,
        written as 2-local terms through the ancilla.

        Args:
            A: Hermitian operator on the first qubit block
            B: Hermitian operator on the second qubit block
            delta: Energy scale

        Returns:
            GadgetInstance
        """
        A = self.operators.check_hermitian(A, "A")
        B = self.operators.check_hermitian(B, "B")
        a_sites = tuple(range(_qubit_count(A, "A")))
        b_sites = tuple(range(len(a_sites), len(a_sites) + _qubit_count(B, "B")))
        n = len(a_sites) + len(b_sites)
        anc = n

        target = self._product_target([A, B], [a_sites, b_sites], n)
        layout = target.layout.extended([2])
        layout.check_cap(self.settings.dim_cap)
        coupling = math.sqrt(delta) / math.sqrt(2.0)
        gadget = LocalHamiltonian(layout, [
            LocalTerm(delta * KET1, (anc,), "Delta|1><1|"),
            LocalTerm(-coupling * np.kron(A, PAULI_X), a_sites + (anc,), "A X"),
            LocalTerm(coupling * np.kron(B, PAULI_X), b_sites + (anc,), "B X"),
            LocalTerm(0.5 * A @ A, a_sites, "A^2/2"),
            LocalTerm(0.5 * B @ B, b_sites, "B^2/2"),
        ])
        return GadgetInstance(target, gadget, [anc], GadgetInstance.SUBDIVISION, delta)

    def subdivision_inputs(self, A, B):
        """
        (V0, V1) joint-space operators equivalent to the subdivision gadget.
        """
        A = as_array(A)
        B = as_array(B)
        I_a = np.eye(A.shape[0])
        I_b = np.eye(B.shape[0])
        V1 = np.kron(-np.kron(A, I_b) + np.kron(I_a, B), PAULI_X) / math.sqrt(2.0)
        V0 = 0.5 * np.kron(np.kron(A @ A, I_b) + np.kron(I_a, B @ B), np.eye(2))
        return V0, V1

    def three_to_two_gadget(self, A, B, C, delta):
        """
        3-to-2 gadget for H = A x B x C with all terms 2-local.

        Args:
            A: Hermitian operator on the first qubit block
            B: Hermitian operator on the second qubit block
            C: Hermitian operator on the third qubit block
            delta: Energy scale

        Returns:
            GadgetInstance
        """
        A = self.operators.check_hermitian(A, "A")
        B = self.operators.check_hermitian(B, "B")
        C = self.operators.check_hermitian(C, "C")
        n_a, n_b, n_c = _qubit_count(A, "A"), _qubit_count(B, "B"), _qubit_count(C, "C")
        a_sites = tuple(range(n_a))
        b_sites = tuple(range(n_a, n_a + n_b))
        c_sites = tuple(range(n_a + n_b, n_a + n_b + n_c))
        n = n_a + n_b + n_c
        anc = n

        target = self._product_target([A, B, C], [a_sites, b_sites, c_sites], n)
        layout = target.layout.extended([2])
        layout.check_cap(self.settings.dim_cap)
        d23 = delta ** (2.0 / 3.0)
        d13 = delta ** (1.0 / 3.0)
        root = 1.0 / math.sqrt(2.0)
        gadget = LocalHamiltonian(layout, [
            LocalTerm(delta * KET1, (anc,), "Delta|1><1|"),
            # Delta^{2/3} V2
            LocalTerm(-d23 * root * np.kron(A, PAULI_X), a_sites + (anc,), "A X"),
            LocalTerm(d23 * root * np.kron(B, PAULI_X), b_sites + (anc,), "B X"),
            LocalTerm(-d23 * np.kron(C, KET1), c_sites + (anc,), "C |1><1|"),
            # Delta^{1/3} V1 = Delta^{1/3} (A^2/2 + B^2/2 - A B)
            LocalTerm(0.5 * d13 * A @ A, a_sites, "A^2/2"),
            LocalTerm(0.5 * d13 * B @ B, b_sites, "B^2/2"),
            LocalTerm(-d13 * np.kron(A, B), a_sites + b_sites, "A B"),
            # V0
            LocalTerm(0.5 * np.kron(A @ A, C), a_sites + c_sites, "A^2 C/2"),
            LocalTerm(0.5 * np.kron(B @ B, C), b_sites + c_sites, "B^2 C/2"),
        ])
        return GadgetInstance(target, gadget, [anc], GadgetInstance.THREE_TO_TWO, delta)

    def three_to_two_inputs(self, A, B, C):
        """
        (V0, V1, V2) joint-space operators equivalent to the 3-to-2 gadget.
        """
        A, B, C = as_array(A), as_array(B), as_array(C)
        I_a, I_b, I_c = np.eye(A.shape[0]), np.eye(B.shape[0]), np.eye(C.shape[0])
        difference = -np.kron(np.kron(A, I_b), I_c) + np.kron(np.kron(I_a, B), I_c)
        C_full = np.kron(np.kron(I_a, I_b), C)
        V2 = np.kron(difference, PAULI_X) / math.sqrt(2.0) - np.kron(C_full, KET1)
        V1 = 0.5 * np.kron(difference @ difference, np.eye(2))
        V0 = 0.5 * np.kron(np.kron(np.kron(A @ A, I_b), C) + np.kron(np.kron(I_a, B @ B), C), np.eye(2))
        return V0, V1, V2

    def _exact_parts(self, A, B, C):
        A = self.operators.check_hermitian(A, "A")
        B = self.operators.check_hermitian(B, "B")
        C = self.operators.check_hermitian(C, "C")
        for name, op in (("A", A), ("B", B), ("C", C)):
            if op.shape != (2, 2):
                raise ConfigError(f"{name} must be a single-qubit operator")
        lam_a, vec_a = np.linalg.eigh(A)
        lam_b, vec_b = np.linalg.eigh(B)
        proj_a0 = np.outer(vec_a[:, 0], vec_a[:, 0].conj())
        proj_b0 = np.outer(vec_b[:, 0], vec_b[:, 0].conj())
        proj_b1 = np.outer(vec_b[:, 1], vec_b[:, 1].conj())
        return A, B, C, lam_a, lam_b, proj_a0, proj_b0, proj_b1

    def exact_three_to_two(self, A, B, C):
        """
        Exact 3-to-2 gadget on four qubits.

        Sites: 0 holds A (second copy), 1 holds B, 2 holds C, 3 is the
        ancilla (first copy of A). The restriction of H' to range(P')
        reproduces the spectrum of A x B x C exactly.

        Args:
            A: Single-qubit Hermitian operator
            B: Single-qubit Hermitian operator
            C: Single-qubit Hermitian operator

        Returns:
            (GadgetInstance, P' as ndarray)
        """
        A, B, C, lam_a, lam_b, proj_a0, proj_b0, proj_b1 = self._exact_parts(A, B, C)
        shifted = A - lam_a[0] * np.eye(2)
        target = self._product_target([A, B, C], [(0,), (1,), (2,)], 3)
        layout = SiteLayout.qubits(4)
        gadget = LocalHamiltonian(layout, [
            LocalTerm(lam_b[0] * np.kron(shifted, C), (3, 2), "(A-a0) C on ancilla"),
            LocalTerm(lam_b[1] * np.kron(shifted, C), (0, 2), "(A-a0) C"),
            LocalTerm(lam_a[0] * np.kron(B, C), (1, 2), "B C"),
        ])
        I2 = np.eye(2)
        P_prime = (np.kron(np.kron(np.kron(proj_a0, proj_b0), I2), I2)
                   + np.kron(np.kron(np.kron(I2, proj_b1), I2), proj_a0))
        instance = GadgetInstance(target, gadget, [3], GadgetInstance.EXACT_THREE_TO_TWO)
        instance.diagnostics["ancilla_projector"] = proj_a0
        return instance, P_prime

    def exact_three_to_two_unitary(self, A, B):
        """
        Swap-based unitary of the exact gadget: swap sites 0 and 3 when B is
        in its lower eigenstate, identity otherwise.
        """
        lam_b, vec_b = np.linalg.eigh(as_array(B))
        proj_b0 = np.outer(vec_b[:, 0], vec_b[:, 0].conj())
        proj_b1 = np.outer(vec_b[:, 1], vec_b[:, 1].conj())
        layout = SiteLayout.qubits(4)
        swap = self.hamiltonians.embed_term(SWAP, (0, 3), layout)
        return (swap @ self.hamiltonians.embed_term(proj_b0, (1,), layout)
                + self.hamiltonians.embed_term(proj_b1, (1,), layout))

    def exact_three_to_two_low_energy(self, A, B, C, delta):
        """
        Exact gadget lifted to a (Delta, 2, 0)-gadget by adding delta (I - P').

        I - P' = Pi^B_0 (I - Pi^A_0)_0 + Pi^B_1 (I - Pi^A_0)_3, so the added
        penalty stays 2-local.

        Returns:
            (GadgetInstance, P' as ndarray)
        """
        instance, P_prime = self.exact_three_to_two(A, B, C)
        _, _, _, _, _, proj_a0, proj_b0, proj_b1 = self._exact_parts(A, B, C)
        excited = np.eye(2) - proj_a0
        instance.gadget.add_term(LocalTerm(delta * np.kron(proj_b0, excited), (1, 0), "penalty B0"))
        instance.gadget.add_term(LocalTerm(delta * np.kron(proj_b1, excited), (1, 3), "penalty B1"))
        instance.delta = delta
        return instance, P_prime

    def embed_instance(self, instance, n_system, site_map):
        """
        Move a gadget's target sites into a larger system.

        Args:
            instance: GadgetInstance
            n_system: Number of system sites of the new layout
            site_map: Mapping old system site -> new system site

        Returns:
            New GadgetInstance (without witness); ancillas follow the system sites
        """
        old_n = instance.n_system
        if sorted(site_map) != list(range(old_n)):
            raise ConfigError("site_map must cover every system site of the instance")
        if len(set(site_map.values())) != old_n or not all(0 <= s < n_system for s in site_map.values()):
            raise ConfigError("site_map must be injective into the new system")
        n_anc = len(instance.ancilla_sites)

        def relabel(site):
            return site_map[site] if site < old_n else n_system + (site - old_n)

        target = LocalHamiltonian(SiteLayout.qubits(n_system))
        for term in instance.target.terms:
            target.add_term(LocalTerm(term.operator, [relabel(s) for s in term.support], term.label))
        gadget = LocalHamiltonian(SiteLayout.qubits(n_system + n_anc))
        gadget.layout.check_cap(self.settings.dim_cap)
        for term in instance.gadget.terms:
            gadget.add_term(LocalTerm(term.operator, [relabel(s) for s in term.support], term.label))
        return GadgetInstance(target, gadget, list(range(n_system, n_system + n_anc)), instance.kind,
                              instance.delta, diagnostics=instance.diagnostics)

    # ------------------------------------------------------------------
    # Verification
    # ------------------------------------------------------------------

    def ancilla_projector(self, instance, P=None):
        """
        Ancilla projector, defaulting to |0><0| on every ancilla qubit.
        """
        if P is not None:
            return as_array(P)
        if "ancilla_projector" in instance.diagnostics:
            return as_array(instance.diagnostics["ancilla_projector"])
        result = np.ones((1, 1), dtype=complex)
        for _ in instance.ancilla_sites:
            result = np.kron(result, KET0)
        return result

    def _system_dim(self, instance):
        return instance.target.layout.total_dim

    def _check_trailing_ancillas(self, instance):
        n = instance.n_system
        if instance.ancilla_sites != list(range(n, instance.gadget.n_sites)):
            raise ConfigError("Ancilla sites must follow the system sites")

    def lift_projector(self, instance, P):
        """
        I x P on the joint space.
        """
        self._check_trailing_ancillas(instance)
        return np.kron(np.eye(self._system_dim(instance)), as_array(P))

    def _witness(self, instance, P, P_prime, U, S=None, compressed=None, delta=None):
        H_prime = self.hamiltonians.assemble_matrix(instance.gadget)
        H = self.hamiltonians.assemble_matrix(instance.target)
        if compressed is None:
            compressed = P_prime @ H_prime @ P_prime
        reference = U @ np.kron(H, P) @ U.conj().T
        eps = self.operators.op_norm(compressed - reference)
        eta = self.operators.op_norm(U - np.eye(U.shape[0]))
        witness = GadgetWitness(P, U, eta, eps, delta=delta, S=S, P_prime=P_prime,
                                gadget_norm=self.operators.op_norm(H_prime))
        logger.debug("Witness for %s: %s", instance.kind, witness)
        return witness

    def verify_eta_eps(self, instance, P=None, P_prime=None, U=None):
        """
        Measure eta and eps of the (eta, eps) definition.

        With U omitted, U is the direct rotation from I x P to P'.

        Args:
            instance: GadgetInstance
            P: Ancilla projector (default |0><0| per ancilla)
            P_prime: Joint-space projector
            U: Optional unitary with U (I x P) U^dagger = P'

        Returns:
            GadgetWitness
        """
        if P_prime is None:
            raise ConfigError("P' is required")
        P = self.ancilla_projector(instance, P)
        P_prime = self.operators.check_projector(P_prime, "P'")
        lifted = self.lift_projector(instance, P)
        if U is not None:
            return self.verify_with_unitary(instance, P, U, P_prime)
        rank_lifted = self.operators.projector_rank(lifted)
        rank_prime = self.operators.projector_rank(P_prime)
        if rank_lifted != rank_prime:
            raise RankMismatchError(f"rank(I x P) = {rank_lifted} but rank(P') = {rank_prime}")
        rotation = self.rotations.direct_rotation(lifted, P_prime)
        return self._witness(instance, P, P_prime, rotation.W, S=rotation.S)

    def verify_with_unitary(self, instance, P, U, P_prime=None):
        """
        Measure eta and eps for a caller-supplied unitary.

        Args:
            instance: GadgetInstance
            P: Ancilla projector
            U: Unitary on the joint space
            P_prime: Optional P'; checked against U (I x P) U^dagger

        Returns:
            GadgetWitness
        """
        P = self.ancilla_projector(instance, P)
        U = as_array(U)
        if self.operators.op_norm(U.conj().T @ U - np.eye(U.shape[0])) > 1e-9:
            raise ConfigError("U is not unitary")
        rotated = U @ self.lift_projector(instance, P) @ U.conj().T
        if P_prime is not None and self.operators.op_norm(rotated - as_array(P_prime)) > 1e-8:
            raise NumericalError("U (I x P) U^dagger differs from the supplied P'")
        return self._witness(instance, P, rotated, U)

    def verify_low_energy(self, instance, delta, P=None):
        """
        Measure eta and eps with P' the projector below delta.

        Args:
            instance: GadgetInstance
            delta: Energy cut
            P: Ancilla projector (default |0><0| per ancilla)

        Returns:
            GadgetWitness with delta set
        """
        P = self.ancilla_projector(instance, P)
        lifted = self.lift_projector(instance, P)
        H_prime = self.hamiltonians.assemble_matrix(instance.gadget)
        eigenvalues, eigenvectors = self.operators.herm_eig(H_prime)
        gaps = np.abs(eigenvalues - delta)
        if gaps.min() < self.settings.degeneracy_tol:
            # Same rule as low_energy_projector
            self.operators.low_energy_projector(H_prime, delta)
        low = eigenvalues <= delta
        rank_low = int(low.sum())
        rank_lifted = self.operators.projector_rank(lifted)
        if rank_low != rank_lifted:
            raise RankMismatchError(
                f"Low-energy subspace below {delta:g} has rank {rank_low}, I x P has rank {rank_lifted}"
            )
        vectors = eigenvectors[:, low]
        P_prime = vectors @ vectors.conj().T
        compressed = (vectors * eigenvalues[low]) @ vectors.conj().T
        rotation = self.rotations.direct_rotation(lifted, P_prime)
        return self._witness(instance, P, P_prime, rotation.W, S=rotation.S,
                             compressed=compressed, delta=delta)

    # ------------------------------------------------------------------
    # Gadget property
    # ------------------------------------------------------------------

    def sample_else_hamiltonians(self, n_sites, count, j_max, rng, sites=None, adversarial_sites=None,
                                 terms_per_sample=3):
        """
        Random bystander Hamiltonians on the target layout.

        Each sample sums random Pauli strings on `sites` (plus an X or Y term on
        one adversarial site when given), is normalized to unit operator norm
        and scaled by a uniform strength in [0, j_max].

        Returns:
            List of LocalHamiltonian
        """
        sites = list(range(n_sites)) if sites is None else list(sites)
        samples = []
        for _ in range(count):
            strings = []
            for _ in range(terms_per_sample):
                letters = rng.choice(list("IXYZ"), size=len(sites))
                if all(letter == "I" for letter in letters):
                    letters[rng.integers(len(sites))] = rng.choice(list("XYZ"))
                strings.append(PauliString(rng.uniform(0.0, 1.0), dict(zip(sites, letters)), n_sites))
            if adversarial_sites:
                site = int(rng.choice(list(adversarial_sites)))
                strings.append(PauliString(rng.uniform(0.5, 1.0), {site: str(rng.choice(["X", "Y"]))}, n_sites))
            H_else = self.hamiltonians.from_pauli_strings(strings, n_sites)
            norm = self.operators.op_norm(self.hamiltonians.assemble_matrix(H_else))
            scale = rng.uniform(0.0, j_max) / norm if norm > 0 else 0.0
            scaled = LocalHamiltonian(H_else.layout, [
                LocalTerm(scale * t.operator.matrix, t.support, t.label) for t in H_else.terms
            ])
            samples.append(scaled)
        return samples

    def property_residual(self, instance, witness, H_else):
        """
        Sorted-spectrum distance between P'(H' + H_else x I)P' on range(P')
        and (H + H_else) x P on range(I x P).
        """
        H_prime = self.hamiltonians.assemble_matrix(instance.gadget)
        H = self.hamiltonians.assemble_matrix(instance.target)
        E = self.hamiltonians.assemble_matrix(H_else) if H_else is not None else np.zeros_like(H)
        anc_dim = instance.ancilla_dim
        perturbed = self.operators.restricted_spectrum(H_prime + np.kron(E, np.eye(anc_dim)), witness.P_prime)
        rank_p = self.operators.projector_rank(witness.P)
        expected = np.sort(np.repeat(np.linalg.eigvalsh(H + E), rank_p))
        if perturbed.shape != expected.shape:
            raise RankMismatchError("rank(P') does not match dim(H) * rank(P)")
        return float(np.max(np.abs(perturbed - expected)))

    def sample_gadget_property(self, instance, witness, samples):
        """
        Estimate (zeta, eps) of the gadget property from sampled bystanders.

        Fits d_i = eps_hat + zeta_hat ||H_else|| by least squares. The
        estimate is a lower estimate of the worst case over all H_else.

        Args:
            instance: GadgetInstance
            witness: GadgetWitness providing P and P'
            samples: List of LocalHamiltonian on the target layout

        Returns:
            Dictionary with residuals, norms, zeta_hat, eps_hat, envelope intercept
            and the reference zeta = 2 eta
        """
        residuals = []
        norms = []
        for H_else in samples:
            residuals.append(self.property_residual(instance, witness, H_else))
            norms.append(self.operators.op_norm(self.hamiltonians.assemble_matrix(H_else)))
        residuals = np.array(residuals)
        norms = np.array(norms)

        if len(samples) >= 2 and np.ptp(norms) > 0:
            fit = stats.linregress(norms, residuals)
            zeta_hat, eps_hat = float(fit.slope), float(fit.intercept)
        else:
            zeta_hat, eps_hat = 0.0, float(residuals.max(initial=0.0))
        envelope = float(np.max(residuals - zeta_hat * norms, initial=0.0))
        return {
            "residuals": residuals,
            "norms": norms,
            "zeta_hat": zeta_hat,
            "eps_hat": eps_hat,
            "envelope_intercept": envelope,
            "zeta_reference": 2.0 * witness.eta,
        }

    # ------------------------------------------------------------------
    # Combination
    # ------------------------------------------------------------------

    def combine_parallel(self, instances):
        """
        Sum gadgets with disjoint ancillas on a shared target layout.

        Args:
            instances: GadgetInstances, each with a direct-rotation witness

        Returns:
            GadgetInstance of kind parallel-combination whose witness uses
            U = e^{sum S_i}; diagnostics hold the reference combination
        """
        try:
            if not instances:
                raise ConfigError("Nothing to combine")
            if len({id(inst) for inst in instances}) != len(instances):
                raise ConfigError("Ancilla overlap: the same instance appears twice")
            n = instances[0].n_system
            for inst in instances:
                if inst.n_system != n or inst.target.layout != instances[0].target.layout:
                    raise ConfigError("Instances must share the target layout")
                if inst.witness is None or inst.witness.S is None:
                    raise ConfigError(f"{inst} has no direct-rotation witness")
                self._check_trailing_ancillas(inst)

            n_anc = sum(len(inst.ancilla_sites) for inst in instances)
            layout = SiteLayout.qubits(n + n_anc)
            layout.check_cap(self.settings.dim_cap)
            target = LocalHamiltonian(SiteLayout.qubits(n))
            gadget = LocalHamiltonian(layout)
            S = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
            P = np.ones((1, 1), dtype=complex)
            offset = n
            j_prime = j_prime_o = 0.0
            for inst in instances:
                local_anc = len(inst.ancilla_sites)
                mapping = {s: s for s in range(n)}
                mapping.update({n + j: offset + j for j in range(local_anc)})
                for term in inst.target.terms:
                    target.add_term(term)
                for term in inst.gadget.terms:
                    gadget.add_term(LocalTerm(term.operator, [mapping[s] for s in term.support], term.label))
                support = list(range(n)) + list(range(offset, offset + local_anc))
                S += self.hamiltonians.embed_term(inst.witness.S, support, layout)
                P = np.kron(P, inst.witness.P)

                H_i = self.hamiltonians.assemble_matrix(inst.gadget)
                lifted = self.lift_projector(inst, inst.witness.P)
                j_prime = max(j_prime, self.operators.op_norm(H_i))
                j_prime_o = max(j_prime_o, self.operators.op_norm(lifted @ H_i @ (np.eye(H_i.shape[0]) - lifted)))
                offset += local_anc

            combined = GadgetInstance(target, gadget, list(range(n, n + n_anc)), PARALLEL_COMBINATION,
                                      min((i.delta for i in instances if i.delta is not None), default=None))
            H_prime = self.hamiltonians.assemble_matrix(gadget)
            H = self.hamiltonians.assemble_matrix(target)
            e_S = self.operators.evolution_matrix(1j * S, 1.0)
            lifted = np.kron(np.eye(H.shape[0]), P)
            rotated = e_S.conj().T @ H_prime @ e_S
            eps = self.operators.op_norm(lifted @ rotated @ lifted - np.kron(H, P))
            eta = self.operators.op_norm(e_S - np.eye(e_S.shape[0]))
            combined.witness = GadgetWitness(P, e_S, eta, eps, S=S, P_prime=e_S @ lifted @ e_S.conj().T,
                                             gadget_norm=self.operators.op_norm(H_prime))

            eps_max = max(i.witness.eps for i in instances)
            eta_max = max(i.witness.eta for i in instances)
            J = target.max_term_norm()
            combined.diagnostics.update({
                "n_sites": n,
                "n_gadgets": len(instances),
                "eps_max": eps_max,
                "eta_max": eta_max,
                "eta_sum": sum(i.witness.eta for i in instances),
                "J": J,
                "J_prime": j_prime,
                "J_prime_O": j_prime_o,
                "reference": n * (eps_max + eta_max * J + eta_max ** 3 * j_prime_o + eta_max ** 4 * j_prime),
                "pairwise_reference": sum(i.witness.eps + i.witness.eta * J for i in instances),
            })
            logger.info("Combined %d gadgets: eta' = %.3e, eps' = %.3e", len(instances), eta, eps)
            return combined
        except GadgetLabError:
            raise
        except Exception as e:
            raise NumericalError(f"Error combining gadgets: {str(e)}") from e

    def combine_low_energy_check(self, combined, delta_prime=None, delta=None):
        """
        Check that the combined gadget is a low-energy gadget at delta'.

        The check runs only if delta >= (||H|| + J + N(eps + 2 J eta)) / (1/4 - 2 eta).

        Args:
            combined: Result of combine_parallel
            delta_prime: Energy cut (default delta / 2)
            delta: Energy scale the gadgets are certified at (default: combined.delta)

        Returns:
            Dictionary with condition values, rank_match, eta and eps
        """
        diag = combined.diagnostics
        delta = combined.delta if delta is None else delta
        if delta is None:
            raise ConfigError("No energy scale given for the low-energy check")
        delta_prime = delta / 2.0 if delta_prime is None else delta_prime
        H_norm = self.operators.op_norm(self.hamiltonians.assemble_matrix(combined.target))
        J, eps, eta = diag["J"], diag["eps_max"], diag["eta_max"]
        N = diag["n_gadgets"]
        denominator = 0.25 - 2.0 * eta
        required = (H_norm + J + N * (eps + 2.0 * J * eta)) / denominator if denominator > 0 else math.inf
        report = {
            "delta": delta,
            "delta_prime": delta_prime,
            "required_delta": required,
            "condition_met": delta >= required,
            "rank_match": None,
            "eta": None,
            "eps": None,
        }
        if not report["condition_met"]:
            logger.warning("Combination condition fails: delta %g < required %g; check skipped", delta, required)
            return report

        try:
            witness = self.verify_low_energy(combined, delta_prime, combined.witness.P)
        except RankMismatchError as e:
            logger.warning("Rank mismatch at delta' = %g: %s", delta_prime, e)
            report["rank_match"] = False
            return report
        report.update({"rank_match": True, "eta": witness.eta, "eps": witness.eps})
        return report

    def gse_compare(self, H, H_prime, combined=None):
        """
        Difference of ground-state energies of H and H'.

        Args:
            H: Target LocalHamiltonian
            H_prime: Gadget LocalHamiltonian
            combined: Optional combined instance supplying the reference combination

        Returns:
            Dictionary with both ground energies, difference and reference
        """
        e0 = float(np.linalg.eigvalsh(self.hamiltonians.assemble_matrix(H))[0])
        e0_prime = float(np.linalg.eigvalsh(self.hamiltonians.assemble_matrix(H_prime))[0])
        reference = combined.diagnostics.get("reference") if combined is not None else None
        return {"ground": e0, "ground_prime": e0_prime, "difference": abs(e0 - e0_prime), "reference": reference}

    # ------------------------------------------------------------------
    # Consequences of the definitions
    # ------------------------------------------------------------------

    def energy_bound_check(self, J, k_prime, witness, target_locality=None):
        """
        Check ||H'|| >= (2^{-k'} J - eps) / (2 eta).

        The statement form with denominator eta is reported alongside.

        Args:
            J: Strength of the k-fold Pauli target
            k_prime: Locality of the gadget Hamiltonian
            witness: GadgetWitness (with gadget_norm)
            target_locality: Optional k; the bound needs k' < k

        Returns:
            Dictionary with lhs, rhs, rhs_statement, applicable and holds
        """
        separation = 2.0 ** (-k_prime) * J
        applicable = witness.eps < separation and witness.eta > 0
        if target_locality is not None and k_prime >= target_locality:
            applicable = False
        report = {
            "lhs": witness.gadget_norm,
            "rhs": None,
            "rhs_statement": None,
            "applicable": applicable,
            "holds": None,
        }
        if not applicable:
            return report
        report["rhs"] = (separation - witness.eps) / (2.0 * witness.eta)
        report["rhs_statement"] = (separation - witness.eps) / witness.eta
        report["holds"] = witness.gadget_norm >= report["rhs"]
        return report

    def subspace_evolution_check(self, instance, witness, rho, t):
        """
        Trace distance between evolution under H' and under the encoded
        target U (H x P) U^dagger, for the encoded state U (rho x P/rank P) U^dagger.

        Returns:
            Dictionary with distance and the bound 2 eps t + 4 eta
        """
        H_prime = self.hamiltonians.assemble_matrix(instance.gadget)
        H = self.hamiltonians.assemble_matrix(instance.target)
        P = witness.P
        U = witness.U
        ancilla_state = P / np.trace(P).real
        rho_prime = U @ np.kron(as_array(rho), ancilla_state) @ U.conj().T
        encoded = U @ np.kron(H, P) @ U.conj().T
        V_prime = self.operators.evolution_matrix(H_prime, t)
        V_enc = self.operators.evolution_matrix(encoded, t)
        distance = self.operators.trace_norm(
            V_prime @ rho_prime @ V_prime.conj().T - V_enc @ rho_prime @ V_enc.conj().T
        )
        bound = 2.0 * witness.eps * abs(t) + 4.0 * witness.eta
        return {"distance": distance, "bound": bound, "holds": distance <= bound + 1e-9}

    def low_energy_part_check(self, instance, witness):
        """
        ||(I x P) H' (I x P)|| against ||H|| + eps + eta J'_O + eta^2 J'.

        Returns:
            Dictionary with lhs, reference and their ratio
        """
        H_prime = self.hamiltonians.assemble_matrix(instance.gadget)
        H = self.hamiltonians.assemble_matrix(instance.target)
        lifted = self.lift_projector(instance, witness.P)
        outside = np.eye(lifted.shape[0]) - lifted
        lhs = self.operators.op_norm(lifted @ H_prime @ lifted)
        j_prime_o = self.operators.op_norm(lifted @ H_prime @ outside)
        reference = (self.operators.op_norm(H) + witness.eps + witness.eta * j_prime_o
                     + witness.eta ** 2 * witness.gadget_norm)
        return {"lhs": lhs, "reference": reference, "ratio": lhs / reference if reference else math.inf}

    def gadget_to_json(self, instance):
        """
        Serialize a gadget: the Hamiltonian JSON of H' plus ancilla sites,
        energy scale and witness values.
        """
        doc = self.hamiltonians.hamiltonian_to_json(instance.gadget)
        doc["ancilla_sites"] = list(instance.ancilla_sites)
        doc["delta"] = instance.delta
        doc["witness"] = instance.witness.to_dict() if instance.witness is not None else None
        return doc
