import math

import numpy as np
import pytest
from scipy import linalg

from controllers.rotation_controller import GENERATOR_CONSTANT
from utils.errors import HypothesisError, RankMismatchError, RotationUndefinedError
from utils.sampling import random_hermitian, random_projector, random_unitary


def ket_projector(theta):
    ket = np.array([math.cos(theta), math.sin(theta)])
    return np.outer(ket, ket)


def nearby_projector(rng, P, strength=0.1):
    V = linalg.expm(1j * random_hermitian(rng, P.shape[0], scale=strength))
    return V @ P @ V.conj().T


def test_direct_rotation_two_by_two_closed_form(rotations):
    rotation = rotations.direct_rotation(ket_projector(0.0), ket_projector(0.4))
    assert rotation.distance_from_identity() == pytest.approx(2 * math.sin(0.2), abs=1e-12)


def test_direct_rotation_of_equal_projectors_is_identity(rotations, rng):
    P = random_projector(rng, 4, 2)
    rotation = rotations.direct_rotation(P, P)
    np.testing.assert_allclose(rotation.W, np.eye(4), atol=1e-10)
    assert rotation.generator_norm() < 1e-10


def test_direct_rotation_invariants(rotations, rng):
    P = random_projector(rng, 6, 2)
    Q = nearby_projector(rng, P, 0.3)
    rotation = rotations.direct_rotation(P, Q)
    W, S = rotation.W, rotation.S
    I6 = np.eye(6)
    np.testing.assert_allclose(W @ P @ W.conj().T, Q, atol=1e-9)
    np.testing.assert_allclose(S, -S.conj().T, atol=1e-12)
    for proj in (P, I6 - P, Q, I6 - Q):
        assert np.linalg.norm(proj @ S @ proj, 2) < 1e-9
    assert rotation.generator_norm() < math.pi / 2
    assert rotation.generator_norm() <= GENERATOR_CONSTANT * rotation.distance_from_identity() + 1e-9
    np.testing.assert_allclose(linalg.expm(S), W, atol=1e-9)


def test_generator_norm_bound_on_random_pairs(rotations, rng):
    violations = 0
    for _ in range(200):
        dim = int(rng.integers(2, 9))
        P = random_projector(rng, dim, int(rng.integers(1, dim)))
        # ||P - Q|| <= 2 ||V - I|| <= 2 * strength < 1
        Q = nearby_projector(rng, P, float(rng.uniform(0.01, 0.45)))
        rotation = rotations.direct_rotation(P, Q)
        norm = rotation.generator_norm()
        if norm >= math.pi / 2 or norm > GENERATOR_CONSTANT * rotation.distance_from_identity() + 1e-9:
            violations += 1
    assert violations == 0


def test_direct_rotation_matches_reflection_definition(rotations, rng):
    P = random_projector(rng, 5, 2)
    Q = nearby_projector(rng, P, 0.2)
    np.testing.assert_allclose(rotations.direct_rotation(P, Q).W,
                               rotations.direct_rotation_by_reflections(P, Q), atol=1e-9)


def test_forward_and_backward_rotations_compose_to_identity(rotations, rng):
    P = random_projector(rng, 6, 3)
    Q = nearby_projector(rng, P, 0.2)
    forward = rotations.direct_rotation(P, Q).W
    backward = rotations.direct_rotation(Q, P).W
    np.testing.assert_allclose(backward @ forward, np.eye(6), atol=1e-8)


def test_direct_rotation_is_minimal_among_challengers(rotations, rng):
    P = random_projector(rng, 6, 2)
    Q = nearby_projector(rng, P, 0.3)
    best = rotations.direct_rotation(P, Q).distance_from_identity()
    for V in rotations.rotation_challengers(P, Q, rng, count=50):
        np.testing.assert_allclose(V @ P @ V.conj().T, Q, atol=1e-9)
        assert best <= np.linalg.norm(V - np.eye(6), 2) + 1e-9


def test_direct_rotation_errors(rotations):
    with pytest.raises(RotationUndefinedError):
        rotations.direct_rotation(ket_projector(0.0), ket_projector(math.pi / 2))
    with pytest.raises(RankMismatchError):
        rotations.direct_rotation(np.diag([1.0, 0.0, 0.0]), np.diag([1.0, 1.0, 0.0]))


def test_davis_kahan_on_perturbed_blocks(rotations, operators, rng):
    violations = 0
    for _ in range(200):
        dim = int(rng.integers(3, 9))
        rank = int(rng.integers(1, dim))
        separation = float(rng.uniform(3.0, 10.0))
        strength = float(rng.uniform(0.01, 0.3))
        spectrum = np.concatenate([rng.uniform(0.0, 1.0, rank),
                                   rng.uniform(1.0 + separation, 3.0 + separation, dim - rank)])
        U = random_unitary(rng, dim)
        A = U @ np.diag(spectrum) @ U.conj().T
        P_A = U[:, :rank] @ U[:, :rank].conj().T
        B = A + random_hermitian(rng, dim, scale=strength)
        P_B = operators.low_energy_projector(B, 1.0 + separation / 2.0).matrix
        report = rotations.davis_kahan_check(A, B, P_A, P_B, 0.0, 1.0, separation - strength)
        if not report["holds"]:
            violations += 1
    assert violations == 0


def test_davis_kahan_commuting_case(rotations):
    A = np.diag([0.0, 10.0])
    B = np.diag([0.5, 10.0])
    P = np.diag([1.0, 0.0])
    report = rotations.davis_kahan_check(A, B, P, P, 0.0, 0.0, 9.5)
    assert report["lhs"] == pytest.approx(0.0, abs=1e-12)
    assert report["holds"]


def test_davis_kahan_reports_broken_hypothesis(rotations):
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    P = np.diag([1.0, 0.0])
    with pytest.raises(HypothesisError):
        rotations.davis_kahan_check(A, A, P, P, 0.0, 0.0, 1.0)


def test_projector_commutator_closed_form(rotations):
    report = rotations.projector_commutator_check(ket_projector(0.0), ket_projector(math.pi / 4))
    assert report["f"] == pytest.approx(0.5)
    assert report["commutator_norm"] == pytest.approx(0.5)


def test_projector_commutator_identity_on_random_pairs(rotations, rng):
    for _ in range(200):
        dim = int(rng.integers(2, 9))
        P = random_projector(rng, dim, int(rng.integers(1, dim)))
        Q = random_projector(rng, dim, int(rng.integers(1, dim)))
        assert rotations.projector_commutator_check(P, Q)["identity_residual"] <= 1e-8


def test_ad_remainder_bound(rotations, rng):
    violations = 0
    for _ in range(200):
        dim = int(rng.integers(2, 7))
        S = 1j * random_hermitian(rng, dim, scale=float(rng.uniform(0.05, 2.0)))
        H = random_hermitian(rng, dim, scale=float(rng.uniform(0.5, 3.0)))
        report = rotations.ad_remainder(S, H, int(rng.integers(0, 4)))
        if not report["holds"]:
            violations += 1
    assert violations == 0


def test_ad_remainder_trivial_cases(rotations, rng):
    H = random_hermitian(rng, 3)
    assert rotations.ad_remainder(np.zeros((3, 3)), H, 1)["remainder"] == pytest.approx(0.0, abs=1e-12)
    D = np.diag([1.0, 2.0, 3.0])
    assert rotations.ad_remainder(1j * D, D, 1)["remainder"] == pytest.approx(0.0, abs=1e-12)


def test_local_ad_bound_ratio_stays_bounded(rotations, hamiltonians):
    ratios = []
    for n in range(4, 8):
        S = hamiltonians.pauli_chain(n, zz=0.0, x=0.3)
        H = hamiltonians.pauli_chain(n, zz=1.0, x=0.0)
        ratios.append(rotations.local_ad_bound_check(S, H, 2, hamiltonians)["ratio"])
    # Each bond contributes at most 16 J_S^2 J_H
    assert max(ratios) < 16.0
    assert max(ratios) / min(ratios) < 3.0
