"""
Lightcone controller for the gadget toolkit.
Handles window-truncated simulation of local observables on chains.
"""
import logging

import numpy as np
import pandas as pd
from scipy import stats

from models.operator import PAULI_MATRICES, PauliString
from utils.errors import ConfigError, DimensionError, FitError

logger = logging.getLogger(__name__)

MAX_DENSE_SITES = 12


class LightconeController:
    """
    Controller for Lieb-Robinson window truncation.
    """

    def __init__(self, settings, operator_controller, hamiltonian_controller):
        """
        Initialize the lightcone controller.

        Args:
            settings: Settings instance
            operator_controller: OperatorController instance
            hamiltonian_controller: HamiltonianController instance
        """
        self.settings = settings
        self.operators = operator_controller
        self.hamiltonians = hamiltonian_controller

    def chain_builder(self, zz, g):
        """
        Builder m -> open chain with ZZ coupling zz and transverse field g.
        """
        def build(m):
            if m == 1:
                # Single site keeps only the field
                return self.hamiltonians.from_pauli_strings([PauliString(g, {0: "X"}, 1)], 1)
            return self.hamiltonians.pauli_chain(m, zz=zz, x=g)
        return build

    def truncated_expectation(self, builder, m, O, psi0, t):
        """
        <O(t)> on a window of m sites centred on the observable.

        Args:
            builder: Callable m -> LocalHamiltonian on m sites
            m: Window size
            O: Operator on w consecutive sites, placed at the window centre
            psi0: Single-site state; the window starts in its m-fold product
            t: Evolution time

        Returns:
            Real expectation value
        """
        if m > MAX_DENSE_SITES:
            raise DimensionError(f"Window of {m} sites exceeds the dense limit of {MAX_DENSE_SITES}")
        O = np.asarray(O, dtype=complex)
        width = int(round(np.log2(O.shape[0])))
        if width > m:
            raise ConfigError(f"Observable on {width} sites does not fit in a window of {m}")
        start = m // 2 - width // 2
        support = list(range(start, start + width))

        H = builder(m)
        O_full = self.hamiltonians.embed_term(O, support, H.layout)
        psi = np.ones(1, dtype=complex)
        for _ in range(m):
            psi = np.kron(psi, psi0)
        eigenvalues, eigenvectors = self.operators.herm_eig(self.hamiltonians.assemble_matrix(H))
        psi_t = eigenvectors @ (np.exp(-1j * t * eigenvalues) * (eigenvectors.conj().T @ psi))
        return float(np.vdot(psi_t, O_full @ psi_t).real)

    def _observable(self, exp):
        if exp.observable not in PAULI_MATRICES:
            raise ConfigError(f"Unknown observable letter: {exp.observable}")
        return PAULI_MATRICES[exp.observable]

    def window_sweep(self, exp):
        """
        Truncation error of each window size against the n_full reference.

        Args:
            exp: WindowExperiment

        Returns:
            pandas DataFrame with columns m, value, reference, abs_error, t, g, seed
        """
        if exp.n_full > MAX_DENSE_SITES:
            raise DimensionError(f"n_full = {exp.n_full} exceeds the dense limit of {MAX_DENSE_SITES}")
        builder = self.chain_builder(exp.zz, exp.g)
        O = self._observable(exp)
        reference = self.truncated_expectation(builder, exp.n_full, O, exp.psi0, exp.t)
        rows = []
        for m in exp.m_list:
            value = reference if m == exp.n_full else self.truncated_expectation(builder, m, O, exp.psi0, exp.t)
            rows.append({
                "m": m,
                "value": value,
                "reference": reference,
                "abs_error": abs(value - reference),
                "t": exp.t,
                "g": exp.g,
                "seed": exp.seed,
            })
            logger.debug("Window m=%d: error %.3e", m, rows[-1]["abs_error"])
        return pd.DataFrame(rows)

    def reference_convergence(self, exp):
        """
        |ref(n_full) - ref(n_full - 2)|, the floor of the finite reference.
        """
        if exp.n_full < 3:
            raise ConfigError("Reference convergence needs n_full >= 3")
        builder = self.chain_builder(exp.zz, exp.g)
        O = self._observable(exp)
        full = self.truncated_expectation(builder, exp.n_full, O, exp.psi0, exp.t)
        smaller = self.truncated_expectation(builder, exp.n_full - 2, O, exp.psi0, exp.t)
        return abs(full - smaller)

    def tail_fit(self, table, points=4):
        """
        Slope and R^2 of log(abs_error) against m over the last nonzero points.

        Args:
            table: DataFrame from window_sweep
            points: Number of trailing points used

        Returns:
            Dictionary with slope, intercept, r_squared and points
        """
        usable = table[table["abs_error"] > self.settings.noise_floor]
        tail = usable.tail(points)
        if len(tail) < 3:
            raise FitError(f"Need at least 3 nonzero errors for a tail fit, got {len(tail)}")
        result = stats.linregress(tail["m"].to_numpy(dtype=float), np.log(tail["abs_error"].to_numpy()))
        return {
            "slope": float(result.slope),
            "intercept": float(result.intercept),
            "r_squared": float(result.rvalue ** 2),
            "points": len(tail),
        }
