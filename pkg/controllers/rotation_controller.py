"""
Rotation controller for the gadget toolkit.
Handles direct rotations between projectors and the spectral perturbation
checks built on them.
"""
import logging
import math

import numpy as np
from scipy import linalg

from controllers.operator_controller import as_array
from models.rotation import DirectRotation
from utils.errors import ConfigError, HypothesisError, RankMismatchError, RotationUndefinedError
from utils.sampling import random_unitary

logger = logging.getLogger(__name__)

GENERATOR_CONSTANT = math.pi / (2.0 * math.sqrt(2.0))


def _unitary_log(W):
    """
    Principal logarithm of a unitary via its complex Schur form.
    """
    T, Z = linalg.schur(W, output="complex")
    phases = np.angle(np.diag(T))
    return (Z * (1j * phases)) @ Z.conj().T


def _unitary_sqrt(W):
    """
    Square root of a unitary with eigenphases halved from (-pi, pi].
    """
    T, Z = linalg.schur(W, output="complex")
    phases = np.angle(np.diag(T))
    # angle() returns -pi for eigenvalue -1 on some platforms; fold onto +pi
    phases = np.where(phases <= -math.pi + 1e-12, math.pi, phases)
    return (Z * np.exp(0.5j * phases)) @ Z.conj().T


class RotationController:
    """
    Controller for direct rotations and perturbation-lemma checks.
    """

    def __init__(self, settings, operator_controller):
        """
        Initialize the rotation controller.

        Args:
            settings: Settings instance
            operator_controller: OperatorController instance
        """
        self.settings = settings
        self.operators = operator_controller

    def _check_pair(self, P, Q):
        P = self.operators.check_projector(P, "P")
        Q = self.operators.check_projector(Q, "Q")
        if P.shape != Q.shape:
            raise ConfigError(f"Projector dimensions differ: {P.shape[0]} vs {Q.shape[0]}")
        rank_p = self.operators.projector_rank(P)
        rank_q = self.operators.projector_rank(Q)
        if rank_p != rank_q:
            raise RankMismatchError(f"rank(P) = {rank_p} but rank(Q) = {rank_q}")
        gap = self.operators.op_norm(P - Q)
        if gap >= 1.0 - 1e-8:
            raise RotationUndefinedError(f"||P - Q|| = {gap:.12g} >= 1; direct rotation undefined")
        return P, Q

    def direct_rotation(self, P, Q):
        """
        Direct rotation from P to Q.

        Computed as the polar factor of QP + (I-Q)(I-P), whose Gram matrix
        I - (P-Q)^2 is inverted through its eigendecomposition.

        Args:
            P: Source projector
            Q: Target projector

        Returns:
            DirectRotation
        """
        P, Q = self._check_pair(P, Q)
        identity = np.eye(P.shape[0])
        M = Q @ P + (identity - Q) @ (identity - P)
        gram = M.conj().T @ M
        eigenvalues, eigenvectors = np.linalg.eigh((gram + gram.conj().T) / 2.0)
        inv_sqrt = (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.conj().T
        W = M @ inv_sqrt
        S = _unitary_log(W)
        # Generator is anti-Hermitian; drop rounding in the Hermitian part
        S = (S - S.conj().T) / 2.0
        return DirectRotation(W, S, P, Q)

    def direct_rotation_by_reflections(self, P, Q):
        """
        Direct rotation from its definition sqrt(R_Q R_P), R = I - 2P.

        Args:
            P: Source projector
            Q: Target projector

        Returns:
            Unitary ndarray
        """
        P, Q = self._check_pair(P, Q)
        identity = np.eye(P.shape[0])
        return _unitary_sqrt((identity - 2 * Q) @ (identity - 2 * P))

    def rotation_challengers(self, P, Q, rng, count=50):
        """
        Random unitaries V with V P V^dagger = Q.

        Any such V is W times a unitary commuting with P.

        Args:
            P: Source projector
            Q: Target projector
            rng: numpy Generator
            count: Number of challengers

        Returns:
            List of unitary ndarrays
        """
        rotation = self.direct_rotation(P, Q)
        inside = self.operators.range_basis(P)
        outside = self.operators.range_basis(np.eye(P.shape[0]) - as_array(P))
        challengers = []
        for _ in range(count):
            block = np.zeros_like(rotation.W)
            if inside.shape[1]:
                u = random_unitary(rng, inside.shape[1])
                block += inside @ u @ inside.conj().T
            if outside.shape[1]:
                u = random_unitary(rng, outside.shape[1])
                block += outside @ u @ outside.conj().T
            challengers.append(rotation.W @ block)
        return challengers

    def restricted_spectrum(self, A, P):
        return self.operators.restricted_spectrum(A, P)

    def davis_kahan_check(self, A, B, P_A, P_B, alpha, beta, gap):
        """
        Check ||W - I|| <= (sqrt(2)/gap) ||(B - A) P_A|| for W the direct
        rotation from P_A to P_B.

        Hypotheses: P_A and P_B reduce A and B; spec(A on P_A) lies in
        [alpha, beta]; spec(B on P_B^perp) avoids (alpha - gap, beta + gap).

        Returns:
            Dictionary with lhs, rhs, slack and holds
        """
        A = self.operators.check_hermitian(A, "A")
        B = self.operators.check_hermitian(B, "B")
        P_A = self.operators.check_projector(P_A, "P_A")
        P_B = self.operators.check_projector(P_B, "P_B")
        if gap <= 0:
            raise HypothesisError(f"Spectral gap must be positive, got {gap}")
        identity = np.eye(A.shape[0])
        tol = 1e-9 * (1.0 + self.operators.op_norm(A) + self.operators.op_norm(B))

        if self.operators.op_norm(P_A @ A @ (identity - P_A)) > tol:
            raise HypothesisError("P_A does not block-diagonalize A")
        if self.operators.op_norm(P_B @ B @ (identity - P_B)) > tol:
            raise HypothesisError("P_B does not block-diagonalize B")
        inside = self.restricted_spectrum(A, P_A)
        if inside.size and (inside.min() < alpha - tol or inside.max() > beta + tol):
            raise HypothesisError(f"spec(A|P_A) = [{inside.min():.6g}, {inside.max():.6g}] not in [{alpha}, {beta}]")
        outside = self.restricted_spectrum(B, identity - P_B)
        forbidden = (outside > alpha - gap + tol) & (outside < beta + gap - tol)
        if np.any(forbidden):
            raise HypothesisError("spec(B|P_B^perp) enters the forbidden window around [alpha, beta]")

        rotation = self.direct_rotation(P_A, P_B)
        lhs = rotation.distance_from_identity()
        rhs = math.sqrt(2.0) / gap * self.operators.op_norm((B - A) @ P_A)
        return {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs, "holds": lhs <= rhs + 1e-9}

    def projector_commutator_check(self, P, Q):
        """
        Check ||[P, Q]|| = sqrt(f - f^2), where f is the distance of PQP from
        the nearest projector, found by rounding the eigenvalues of PQP.

        Returns:
            Dictionary with commutator_norm, f and identity_residual
        """
        P = self.operators.check_projector(P, "P")
        Q = self.operators.check_projector(Q, "Q")
        commutator_norm = self.operators.op_norm(P @ Q - Q @ P)

        eigenvalues = np.linalg.eigvalsh(P @ Q @ P)
        eigenvalues = np.clip(eigenvalues, 0.0, 1.0)
        # Eigenvalues at rounding distance from 0 or 1 count as exact
        snap = 1e-12
        eigenvalues = np.where(eigenvalues < snap, 0.0, eigenvalues)
        eigenvalues = np.where(eigenvalues > 1.0 - snap, 1.0, eigenvalues)
        f = float(np.max(np.minimum(eigenvalues, 1.0 - eigenvalues), initial=0.0))

        residual = abs(commutator_norm - math.sqrt(max(f - f * f, 0.0)))
        return {"commutator_norm": commutator_norm, "f": f, "identity_residual": residual}

    def _nested_commutators(self, S, H, k):
        terms = [H]
        for _ in range(k):
            terms.append(S @ terms[-1] - terms[-1] @ S)
        return terms

    def ad_remainder(self, S, H, k):
        """
        Tail of the expansion e^S H e^{-S} = sum_p ad_S^p(H) / p!.

        Args:
            S: Anti-Hermitian generator
            H: Operator
            k: Number of expansion terms kept (0..6)

        Returns:
            Dictionary with remainder r_k and bound ||ad_S^k(H)|| / k!
        """
        S = as_array(S)
        H = as_array(H)
        if not 0 <= k <= 6:
            raise ConfigError(f"k must be in 0..6, got {k}")
        if np.max(np.abs(S + S.conj().T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(S), initial=0.0)):
            raise ConfigError("S must be anti-Hermitian")

        # e^S = e^{-iK} with K = iS Hermitian
        e_S = self.operators.evolution_matrix(1j * S, 1.0)
        conjugated = e_S @ H @ e_S.conj().T
        nested = self._nested_commutators(S, H, k)
        partial = sum((nested[p] / math.factorial(p) for p in range(k)), np.zeros_like(H))
        remainder = self.operators.op_norm(conjugated - partial)
        bound = self.operators.op_norm(nested[k]) / math.factorial(k)
        return {"remainder": remainder, "bound": bound, "holds": remainder <= bound + 1e-9}

    def local_ad_bound_check(self, S, H, k, hamiltonian_controller):
        """
        Compare ||ad_S^k(H)|| with n J_S^k J_H for local S and H.

        Args:
            S: LocalHamiltonian (Hermitian; the generator is iS)
            H: LocalHamiltonian on the same layout
            k: Nesting depth
            hamiltonian_controller: HamiltonianController used for assembly

        Returns:
            Dictionary with value, reference and ratio
        """
        if S.layout != H.layout:
            raise ConfigError("S and H must share a layout")
        S_matrix = hamiltonian_controller.assemble_matrix(S)
        H_matrix = hamiltonian_controller.assemble_matrix(H)
        value = self.operators.op_norm(self._nested_commutators(S_matrix, H_matrix, k)[k])
        reference = H.n_sites * S.max_term_norm() ** k * H.max_term_norm()
        ratio = value / reference if reference > 0 else 0.0
        logger.debug("ad bound on %d sites, k=%d: ratio %.4f", H.n_sites, k, ratio)
        return {"value": value, "reference": reference, "ratio": ratio, "n_sites": H.n_sites}
