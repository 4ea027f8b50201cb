import json

import numpy as np
import pytest

from models.hamiltonian import LocalHamiltonian, LocalTerm
from models.operator import PAULI_MATRICES, PauliString, SiteLayout
from utils.errors import ConfigError, SchemaError

X, Z, I2 = PAULI_MATRICES["X"], PAULI_MATRICES["Z"], np.eye(2)


def test_embed_term_reorders_support(hamiltonians):
    layout = SiteLayout.qubits(2)
    # X on site 1, Z on site 0
    embedded = hamiltonians.embed_term(np.kron(X, Z), (1, 0), layout)
    np.testing.assert_allclose(embedded, np.kron(Z, X))


def test_embed_term_on_mixed_layout(hamiltonians):
    layout = SiteLayout([2, 3, 2])
    h = np.diag([0.0, 1.0, 2.0])
    embedded = hamiltonians.embed_term(h, (1,), layout)
    np.testing.assert_allclose(embedded, np.kron(np.kron(I2, h), I2))


def test_pauli_chain_assembly_and_stats(hamiltonians):
    H = hamiltonians.pauli_chain(3, zz=1.0, x=0.5)
    expected = (np.kron(np.kron(Z, Z), I2) + np.kron(I2, np.kron(Z, Z))
                + 0.5 * (np.kron(np.kron(X, I2), I2) + np.kron(np.kron(I2, X), I2) + np.kron(I2, np.kron(I2, X))))
    np.testing.assert_allclose(hamiltonians.assemble_matrix(H), expected, atol=1e-12)

    stats = hamiltonians.hypergraph_stats(H)
    assert stats.k == 2
    assert stats.d == 3
    assert stats.J == pytest.approx(1.0)
    assert stats.N == 5


def test_periodic_chain_adds_closing_bond(hamiltonians):
    H = hamiltonians.pauli_chain(4, zz=1.0, periodic=True)
    assert (0, 3) in H.hypergraph.hyperedges
    assert hamiltonians.hypergraph_stats(H).N == 4


def test_zero_terms_are_dropped():
    H = LocalHamiltonian(SiteLayout.qubits(2))
    assert H.add_term(LocalTerm(np.zeros((2, 2)), (0,))) is False
    assert H.terms == []


def test_term_dimension_must_match_support():
    H = LocalHamiltonian(SiteLayout.qubits(2))
    with pytest.raises(ConfigError):
        H.add_term(LocalTerm(np.eye(4), (0,)))
    with pytest.raises(ConfigError):
        H.add_term(LocalTerm(np.eye(2), (5,)))


def test_rebuild_hypergraph(hamiltonians):
    H = hamiltonians.pauli_chain(4, zz=1.0, x=1.0)
    rebuilt = hamiltonians.rebuild_hypergraph(H)
    assert rebuilt.hyperedges == H.hypergraph.hyperedges
    assert rebuilt.max_degree() == H.hypergraph.max_degree()


def test_json_round_trip_preserves_operator(hamiltonians):
    H = hamiltonians.from_pauli_strings([
        PauliString(0.3, {0: "Z", 2: "Y"}, 3),
        PauliString(-1.2, {1: "X"}, 3),
    ], 3)
    doc = json.loads(json.dumps(hamiltonians.hamiltonian_to_json(H)))
    parsed = hamiltonians.hamiltonian_from_json(doc)
    np.testing.assert_allclose(hamiltonians.assemble_matrix(parsed), hamiltonians.assemble_matrix(H), atol=1e-12)


def test_json_pauli_terms(hamiltonians):
    doc = {"dims": [2, 2], "terms": [{"support": [0, 1], "pauli": "zz", "coeff": 0.5}]}
    H = hamiltonians.hamiltonian_from_json(doc)
    np.testing.assert_allclose(hamiltonians.assemble_matrix(H), 0.5 * np.kron(Z, Z))


@pytest.mark.parametrize("doc", [
    {"terms": []},
    {"dims": [2], "terms": [], "extra": 1},
    {"dims": [2], "terms": [{"support": [0], "pauli": "Z", "matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}]},
    {"dims": [2], "terms": [{"support": [0]}]},
    {"dims": [2, 2], "terms": [{"support": [0, 1], "pauli": "Z"}]},
    {"dims": [2], "terms": [{"support": [0], "pauli": "Q"}]},
])
def test_json_rejects_malformed_documents(hamiltonians, doc):
    with pytest.raises(SchemaError):
        hamiltonians.hamiltonian_from_json(doc)


def test_json_rejects_non_hermitian_matrix(hamiltonians):
    doc = {"dims": [2], "terms": [{"support": [0], "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}]}
    with pytest.raises(ConfigError):
        hamiltonians.hamiltonian_from_json(doc)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_qutrit_encoding_reproduces_expectations(hamiltonians, rng, n):
    worst = hamiltonians.encoding_check(n, rng, samples=200)
    assert worst < 1e-10


def test_qutrit_encoding_with_rotated_isometry(hamiltonians, rng):
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    V = q[:, :3]
    assert hamiltonians.encoding_check(2, rng, samples=10, V=V) < 1e-10


def test_qutrit_encoding_rejects_non_isometry(hamiltonians):
    with pytest.raises(ConfigError):
        hamiltonians.qutrit_to_qubit_simulator(1, V=np.ones((4, 3)))


def test_size_independence_report(hamiltonians):
    encoding = hamiltonians.qutrit_to_qubit_simulator(3)
    report = hamiltonians.size_independence_report(hamiltonians.qutrit_number_hamiltonian(3), encoding.simulator)
    assert report["simulator_qubits"] == pytest.approx(6.0)
    assert report["qubit_ratio"] == pytest.approx(2.0 / np.log2(3.0))
    assert report["simulator_locality"] == 2
    assert report["max_strength"] == pytest.approx(1.0)
