import numpy as np
import pytest

from models.operator import PAULI_MATRICES, DenseOperator, PauliString, SiteLayout
from utils.errors import AmbiguityError, ConfigError, DimensionError, NumericalError
from utils.sampling import random_hermitian
from utils.settings import Settings
from controllers.operator_controller import OperatorController

X, Y, Z, I2 = PAULI_MATRICES["X"], PAULI_MATRICES["Y"], PAULI_MATRICES["Z"], np.eye(2)


def test_pauli_embed_orders_sites_most_significant_first(operators):
    p = PauliString.from_label("XIZ", 0.5)
    embedded = operators.pauli_embed(p, SiteLayout.qubits(3))
    np.testing.assert_allclose(embedded.matrix, 0.5 * np.kron(np.kron(X, I2), Z))
    assert embedded.hermitian


def test_pauli_string_drops_identity_factors():
    p = PauliString.from_label("IZIX")
    assert p.support == (1, 3)
    assert p.label() == "IZIX"


@pytest.mark.parametrize("first, second, commutes", [
    ("XX", "ZZ", True),
    ("XI", "ZI", False),
    ("XYZ", "XYZ", True),
    ("XZI", "ZIX", False),
])
def test_commutation(first, second, commutes):
    assert PauliString.from_label(first).commutes_with(PauliString.from_label(second)) is commutes


def test_multiply_commuting_strings():
    product = PauliString.from_label("XX").multiply(PauliString.from_label("ZZ"))
    # (XZ)(XZ) = (-iY)(-iY) = -YY
    assert product.label() == "YY"
    assert product.coefficient == pytest.approx(-1.0)


def test_multiply_rejects_anticommuting_strings():
    with pytest.raises(ConfigError):
        PauliString.from_label("XI").multiply(PauliString.from_label("ZI"))


def test_complex_coefficient_rejected():
    with pytest.raises(ConfigError):
        PauliString(1j, {0: "X"}, 1)


def test_dense_operator_hermitian_declaration_checked():
    with pytest.raises(ConfigError):
        DenseOperator([[0, 1], [0, 0]], hermitian=True)
    with pytest.raises(ConfigError):
        DenseOperator(np.zeros((2, 3)))


def test_dense_operator_is_read_only():
    op = DenseOperator(Z, hermitian=True)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 5


def test_evolution_matrix_matches_closed_form(operators):
    t = 0.7
    U = operators.evolution_matrix(Z, t)
    np.testing.assert_allclose(U, np.diag([np.exp(-1j * t), np.exp(1j * t)]), atol=1e-12)


def test_norms(operators):
    A = np.diag([3.0, -1.0, 0.5])
    assert operators.op_norm(A) == pytest.approx(3.0)
    assert operators.trace_norm(A) == pytest.approx(4.5)


def test_low_energy_projector_rank(operators):
    H = np.kron(Z, I2) + np.kron(I2, Z)
    P = operators.low_energy_projector(H, 0.5)
    assert operators.projector_rank(P) == 3


def test_low_energy_projector_refuses_cut_on_eigenvalue(operators):
    with pytest.raises(AmbiguityError):
        operators.low_energy_projector(np.diag([0.0, 1.0, 2.0]), 1.0)


def test_spectral_distance_within_weyl_bound(operators, rng):
    violations = 0
    for _ in range(200):
        dim = int(rng.integers(2, 9))
        scale = float(rng.uniform(1e-3, 2.0))
        A = random_hermitian(rng, dim, scale=float(rng.uniform(0.5, 5.0)))
        B = A + random_hermitian(rng, dim, scale=scale)
        if operators.spectral_distance(A, B) > scale + 1e-9:
            violations += 1
    assert violations == 0


def test_spectral_distance_reports_broken_weyl_check(operators, monkeypatch):
    monkeypatch.setattr(operators, "op_norm", lambda A: 0.0)
    with pytest.raises(NumericalError):
        operators.spectral_distance(np.diag([0.0, 1.0]), np.diag([0.0, 2.0]))


def test_partial_trace_of_product(operators, rng):
    A = random_hermitian(rng, 2)
    B = random_hermitian(rng, 4)
    layout = SiteLayout.qubits(3)
    reduced = operators.partial_trace(np.kron(A, B), layout, keep=[0])
    np.testing.assert_allclose(reduced.matrix, A * np.trace(B), atol=1e-12)


def test_partial_trace_keeps_middle_site(operators):
    rho = np.kron(np.kron(np.diag([1.0, 0.0]), np.diag([0.25, 0.75])), np.eye(2) / 2)
    reduced = operators.partial_trace(rho, SiteLayout.qubits(3), keep=[1])
    np.testing.assert_allclose(reduced.matrix, np.diag([0.25, 0.75]), atol=1e-12)


def test_restricted_spectrum(operators):
    H = np.diag([4.0, -2.0, 7.0, 1.0])
    P = np.diag([1.0, 1.0, 0.0, 1.0])
    np.testing.assert_allclose(operators.restricted_spectrum(H, P), [-2.0, 1.0, 4.0])


def test_check_projector_rejects_non_idempotent(operators):
    with pytest.raises(ConfigError):
        operators.check_projector(np.diag([1.0, 0.5]))


def test_dimension_cap_enforced():
    operators = OperatorController(Settings(dim_cap=8))
    with pytest.raises(DimensionError):
        operators.pauli_embed(PauliString.from_label("ZZZZ"), SiteLayout.qubits(4))
    with pytest.raises(DimensionError):
        operators.check_hermitian(np.eye(16))


def test_site_layout_extended_and_qutrits():
    layout = SiteLayout([3, 3]).extended([2])
    assert layout.dims == (3, 3, 2)
    assert layout.total_dim == 18
    assert not layout.is_qubit_layout()
    with pytest.raises(ConfigError):
        SiteLayout([1, 2])


def test_pauli_embed_refuses_qutrit_site(operators):
    with pytest.raises(ConfigError):
        operators.pauli_embed(PauliString.from_label("ZX"), SiteLayout([2, 3]))
