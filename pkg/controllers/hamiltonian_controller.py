"""
Hamiltonian controller for the gadget toolkit.
Handles local Hamiltonians: assembly, hypergraph statistics, model builders,
JSON serialization and the qutrit-to-qubit encoding example.
"""
import logging
from collections import namedtuple

import numpy as np

from models.hamiltonian import InteractionHypergraph, LocalHamiltonian, LocalTerm
from models.operator import PAULI_MATRICES, DenseOperator, PauliString, SiteLayout
from utils.errors import ConfigError, GadgetLabError, SchemaError
from utils.sampling import random_density, random_hermitian
from utils.validation import validate_float, validate_pauli_label

logger = logging.getLogger(__name__)

HypergraphStats = namedtuple("HypergraphStats", ["k", "d", "J", "N"])

# Qutrit basis order (down, 0, up); energies 0, 1, 1
QUTRIT_ENERGIES = np.diag([0.0, 1.0, 1.0]).astype(complex)

# Default isometry: down -> |00>, 0 -> |01>, up -> |10>
DEFAULT_QUTRIT_ISOMETRY = np.array(
    [[1, 0, 0],
     [0, 1, 0],
     [0, 0, 1],
     [0, 0, 0]], dtype=complex
)


class QutritEncoding:
    """
    Encoding of n qutrits into 2n qubits through a per-site isometry.
    """

    def __init__(self, n, isometry, simulator):
        """
        Initialize the encoding.

        Args:
            n: Number of qutrits
            isometry: 4 x 3 isometry applied to every qutrit
            simulator: 2-local LocalHamiltonian on 2n qubits
        """
        self.n = n
        self.isometry = isometry
        self.simulator = simulator
        full = np.ones((1, 1), dtype=complex)
        for _ in range(n):
            full = np.kron(full, isometry)
        self.full_isometry = full

    def encode_state(self, rho):
        """
        E_state(rho) = V^{(x)n} rho V^{(x)n, dagger}.
        """
        return self.full_isometry @ np.asarray(rho, dtype=complex) @ self.full_isometry.conj().T

    def encode_observable(self, O):
        """
        E_obs(O), the same isometric conjugation.
        """
        return self.encode_state(O)


class HamiltonianController:
    """
    Controller for local Hamiltonian operations.
    """

    def __init__(self, settings, operator_controller):
        """
        Initialize the Hamiltonian controller.

        Args:
            settings: Settings instance
            operator_controller: OperatorController instance
        """
        self.settings = settings
        self.operators = operator_controller

    def embed_term(self, operator, support, layout):
        """
        Embed an operator on an ordered support into the full layout space.

        Args:
            operator: Operator-like on the supported sites, in support order
            support: Ordered site indices
            layout: SiteLayout

        Returns:
            ndarray on the full space
        """
        matrix = np.asarray(operator, dtype=complex)
        dims = list(layout.dims)
        n = len(dims)
        support = list(support)
        rest = [s for s in range(n) if s not in support]
        order = support + rest
        rest_dim = int(np.prod([dims[s] for s in rest], dtype=np.int64)) if rest else 1
        full = np.kron(matrix, np.eye(rest_dim, dtype=complex))
        if order == list(range(n)):
            return full

        # Axis j of the reshaped tensor belongs to site order[j]
        ordered_dims = [dims[s] for s in order]
        tensor = full.reshape(ordered_dims + ordered_dims)
        inverse = list(np.argsort(order))
        tensor = tensor.transpose(inverse + [p + n for p in inverse])
        return tensor.reshape(layout.total_dim, layout.total_dim)

    def assemble(self, H):
        """
        Dense operator of a local Hamiltonian.

        Args:
            H: LocalHamiltonian

        Returns:
            Hermitian DenseOperator
        """
        H.layout.check_cap(self.settings.dim_cap)
        return DenseOperator(self.assemble_matrix(H), hermitian=True)

    def assemble_matrix(self, H):
        H.layout.check_cap(self.settings.dim_cap)
        dim = H.layout.total_dim
        total = np.zeros((dim, dim), dtype=complex)
        for term in H.terms:
            total += self.embed_term(term.operator.matrix, term.support, H.layout)
        return (total + total.conj().T) / 2.0

    def hypergraph_stats(self, H):
        """
        Locality, maximal degree, maximal term norm and term count.

        Args:
            H: LocalHamiltonian

        Returns:
            HypergraphStats(k, d, J, N)
        """
        return HypergraphStats(
            k=H.hypergraph.locality(),
            d=H.hypergraph.max_degree(),
            J=H.max_term_norm(),
            N=len(H.terms),
        )

    def rebuild_hypergraph(self, H):
        """
        Recompute the interaction hypergraph from the term list.
        """
        return InteractionHypergraph(H.n_sites, [t.support for t in H.terms])

    def pauli_term(self, p, label=None):
        """
        LocalTerm for a Pauli string, restricted to its support.

        Args:
            p: PauliString
            label: Optional label (defaults to the letters on the support)

        Returns:
            LocalTerm
        """
        matrix = np.ones((1, 1), dtype=complex)
        for site in p.support:
            matrix = np.kron(matrix, PAULI_MATRICES[p.factors[site]])
        label = label if label is not None else "".join(p.factors[s] for s in p.support)
        return LocalTerm(DenseOperator(p.coefficient * matrix, hermitian=True), p.support, label)

    def from_pauli_strings(self, strings, n_sites):
        """
        LocalHamiltonian on n qubits from a list of PauliString.
        """
        H = LocalHamiltonian(SiteLayout.qubits(n_sites))
        for p in strings:
            if p.support:
                H.add_term(self.pauli_term(p))
            elif p.coefficient:
                # Pure identity: attach to site 0 so it survives as a term
                H.add_term(LocalTerm(p.coefficient * np.eye(2), (0,), "I"))
        return H

    def pauli_chain(self, m, zz=1.0, x=0.0, periodic=False):
        """
        Nearest-neighbour chain: sum of zz*Z_x Z_{x+1} + x*X_x.

        Args:
            m: Number of sites
            zz: ZZ coupling
            x: Transverse field
            periodic: Whether to add the bond (m-1, 0)

        Returns:
            LocalHamiltonian on m qubits
        """
        if m < 2:
            raise ConfigError(f"A chain needs at least 2 sites, got {m}")
        strings = []
        bonds = m if periodic else m - 1
        for site in range(bonds):
            strings.append(PauliString(zz, {site: "Z", (site + 1) % m: "Z"}, m))
        for site in range(m):
            strings.append(PauliString(x, {site: "X"}, m))
        return self.from_pauli_strings(strings, m)

    def qutrit_number_hamiltonian(self, n):
        """
        H_n = sum_j (P_0 + P_up) on n qutrits.

        Args:
            n: Number of qutrits

        Returns:
            LocalHamiltonian on the qutrit layout
        """
        if n < 1:
            raise ConfigError(f"Need at least one qutrit, got {n}")
        layout = SiteLayout([3] * n)
        layout.check_cap(self.settings.dim_cap)
        return LocalHamiltonian(layout, [LocalTerm(QUTRIT_ENERGIES, (j,), "P0+Pup") for j in range(n)])

    def qutrit_to_qubit_simulator(self, n, V=None):
        """
        Encode the qutrit number Hamiltonian into 2n qubits.

        The simulator term for qutrit j is V h V^dagger on qubits (2j, 2j+1);
        on the code space it acts as E_obs(H_n).

        Args:
            n: Number of qutrits
            V: 4 x 3 isometry (defaults to DEFAULT_QUTRIT_ISOMETRY)

        Returns:
            QutritEncoding with encode_state, encode_observable and simulator
        """
        V = DEFAULT_QUTRIT_ISOMETRY if V is None else np.asarray(V, dtype=complex)
        if V.shape != (4, 3):
            raise ConfigError(f"Isometry must be 4 x 3, got {V.shape}")
        if np.linalg.norm(V.conj().T @ V - np.eye(3), 2) > 1e-12:
            raise ConfigError("V is not an isometry (V^dagger V != I)")
        layout = SiteLayout.qubits(2 * n)
        layout.check_cap(self.settings.dim_cap)

        local = V @ QUTRIT_ENERGIES @ V.conj().T
        simulator = LocalHamiltonian(layout, [LocalTerm(local, (2 * j, 2 * j + 1), "V h V+") for j in range(n)])
        return QutritEncoding(n, V, simulator)

    def encoding_check(self, n, rng, samples=200, V=None):
        """
        Compare encoded and direct qutrit evolution on random triples.

        Args:
            n: Number of qutrits
            rng: numpy Generator
            samples: Number of random (rho, O, t) triples
            V: Optional isometry

        Returns:
            Largest absolute deviation between the two expectations
        """
        encoding = self.qutrit_to_qubit_simulator(n, V)
        H_n = self.assemble_matrix(self.qutrit_number_hamiltonian(n))
        H_sim = self.assemble_matrix(encoding.simulator)
        dim = 3 ** n
        worst = 0.0
        for _ in range(samples):
            rho = random_density(rng, dim)
            O = random_hermitian(rng, dim)
            t = float(rng.uniform(0.0, 5.0))
            U = self.operators.evolution_matrix(H_n, t)
            direct = np.trace(O @ U @ rho @ U.conj().T).real
            U_sim = self.operators.evolution_matrix(H_sim, t)
            rho_enc = encoding.encode_state(rho)
            encoded = np.trace(encoding.encode_observable(O) @ U_sim @ rho_enc @ U_sim.conj().T).real
            worst = max(worst, abs(direct - encoded))
        logger.info("Qutrit encoding check on %d qutrits: max deviation %.3e", n, worst)
        return worst

    def size_independence_report(self, target, simulator):
        """
        Resource comparison between a target and its simulator.

        Args:
            target: LocalHamiltonian being simulated
            simulator: LocalHamiltonian doing the simulation

        Returns:
            Dictionary with qubit ratio and interaction-strength range
        """
        target_qubits = float(np.sum(np.log2(target.layout.dims)))
        sim_qubits = float(np.sum(np.log2(simulator.layout.dims)))
        norms = [t.norm() for t in simulator.terms]
        return {
            "target_qubits": target_qubits,
            "simulator_qubits": sim_qubits,
            "qubit_ratio": sim_qubits / target_qubits if target_qubits else float("inf"),
            "max_strength": max(norms, default=0.0),
            "min_strength": min(norms, default=0.0),
            "simulator_locality": simulator.locality,
        }

    def hamiltonian_to_json(self, H):
        """
        Serialize a local Hamiltonian.

        Args:
            H: LocalHamiltonian

        Returns:
            JSON-compatible dictionary
        """
        terms = []
        for term in H.terms:
            rows = [[[float(z.real), float(z.imag)] for z in row] for row in term.operator.matrix]
            terms.append({
                "support": list(term.support),
                "pauli": None,
                "matrix": rows,
                "coeff": 1.0,
                "label": term.label,
            })
        return {"dims": list(H.layout.dims), "terms": terms}

    def hamiltonian_from_json(self, doc):
        """
        Parse a local Hamiltonian from its JSON form.

        Terms give either a Pauli label or an explicit matrix of [re, im]
        pairs; giving both is rejected.

        Args:
            doc: Dictionary as produced by hamiltonian_to_json

        Returns:
            LocalHamiltonian
        """
        try:
            if not isinstance(doc, dict) or "dims" not in doc:
                raise SchemaError("Hamiltonian JSON needs 'dims'")
            unknown = set(doc) - {"dims", "terms"}
            if unknown:
                raise SchemaError(f"Unknown Hamiltonian keys: {sorted(unknown)}")
            H = LocalHamiltonian(SiteLayout(doc["dims"]))
            H.layout.check_cap(self.settings.dim_cap)

            for index, entry in enumerate(doc.get("terms", [])):
                unknown = set(entry) - {"support", "pauli", "matrix", "coeff", "label"}
                if unknown:
                    raise SchemaError(f"Term {index}: unknown keys {sorted(unknown)}")
                support = entry.get("support")
                if not isinstance(support, list) or not support:
                    raise SchemaError(f"Term {index}: 'support' must be a non-empty list")
                pauli = entry.get("pauli")
                matrix = entry.get("matrix")
                if pauli is not None and matrix is not None:
                    raise SchemaError(f"Term {index}: both 'pauli' and 'matrix' given")
                if pauli is None and matrix is None:
                    raise SchemaError(f"Term {index}: one of 'pauli' or 'matrix' is required")
                coeff = validate_float(entry.get("coeff", 1.0))
                if coeff is None:
                    raise SchemaError(f"Term {index}: 'coeff' must be a number")
                label = entry.get("label", "")

                if pauli is not None:
                    letters = validate_pauli_label(pauli, f"terms[{index}].pauli")
                    if len(letters) != len(support):
                        raise SchemaError(f"Term {index}: Pauli label length differs from support")
                    op = np.ones((1, 1), dtype=complex)
                    for letter in letters:
                        op = np.kron(op, PAULI_MATRICES[letter])
                    label = label or letters
                else:
                    op = np.array([[complex(re, im) for re, im in row] for row in matrix], dtype=complex)
                H.add_term(LocalTerm(DenseOperator(coeff * op, hermitian=True), support, label))
            return H
        except GadgetLabError:
            raise
        except Exception as e:
            raise SchemaError(f"Error parsing Hamiltonian JSON: {str(e)}") from e
