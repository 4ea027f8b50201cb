"""
Experiment models: window-truncation experiments and CLI run configurations.
"""
import numpy as np

from utils.errors import ConfigError


class WindowExperiment:
    """
    Truncated-window simulation of a local observable on a chain.
    """

    def __init__(self, n_full, m_list, t, zz=1.0, g=1.0, observable="Z", psi0=None, seed=0):
        """
        Initialize a window experiment.

        Args:
            n_full: Size of the reference chain
            m_list: Window sizes, strictly increasing
            t: Evolution time
            zz: ZZ coupling of the chain
            g: Transverse field of the chain
            observable: Pauli letter of the observable at the window centre
            psi0: Single-site state repeated on every site (default |0>)
            seed: Seed recorded with the results
        """
        m_list = [int(m) for m in m_list]
        if not m_list:
            raise ConfigError("m_list must not be empty")
        if any(b <= a for a, b in zip(m_list, m_list[1:])):
            raise ConfigError(f"m_list must be strictly increasing, got {m_list}")
        if m_list[0] < 1 or m_list[-1] > n_full:
            raise ConfigError(f"Window sizes must lie in [1, {n_full}], got {m_list}")
        self.n_full = int(n_full)
        self.m_list = m_list
        self.t = float(t)
        self.zz = float(zz)
        self.g = float(g)
        self.observable = observable
        psi0 = np.array([1.0, 0.0]) if psi0 is None else np.asarray(psi0, dtype=complex)
        norm = np.linalg.norm(psi0)
        if psi0.shape != (2,) or norm == 0:
            raise ConfigError("psi0 must be a nonzero single-qubit state")
        self.psi0 = psi0 / norm
        self.seed = seed

    def __str__(self):
        return f"WindowExperiment(n_full={self.n_full}, m={self.m_list}, t={self.t:g}, g={self.g:g})"


class ExperimentConfig:
    """
    Validated run configuration for one CLI invocation.
    """

    # Experiment kinds
    GADGET_VERIFY = "gadget-verify"
    GADGET_SWEEP = "gadget-sweep"
    GADGET_COMBINE = "gadget-combine"
    ZENO_SWEEP = "zeno-sweep"
    ZENO_SIMULATE = "zeno-simulate"
    LIGHTCONE_SWEEP = "lightcone-sweep"
    BOOLFUN = "boolfun"
    ENERGY_BOUND = "energy-bound"

    KINDS = (GADGET_VERIFY, GADGET_SWEEP, GADGET_COMBINE, ZENO_SWEEP, ZENO_SIMULATE,
             LIGHTCONE_SWEEP, BOOLFUN, ENERGY_BOUND)

    def __init__(self, kind, parameters, seed=0, out_path=None):
        """
        Initialize a run configuration.

        Args:
            kind: One of KINDS
            parameters: Kind-specific parameters, already schema-checked
            seed: Random seed
            out_path: Output directory
        """
        if kind not in self.KINDS:
            raise ConfigError(f"Unknown experiment kind: {kind}")
        self.kind = kind
        self.parameters = dict(parameters)
        self.seed = seed
        self.out_path = out_path

    def to_dict(self):
        return {"kind": self.kind, "parameters": self.parameters, "seed": self.seed, "out_path": self.out_path}

    def __str__(self):
        return f"ExperimentConfig({self.kind}, seed={self.seed})"
