"""
Zeno gadget models: gadget specification, simulation task and channels.
"""
import math

import numpy as np

from utils.errors import ConfigError


class ZenoGadgetSpec:
    """
    Terms of the measurement-based gadget H' = H_I x I + H_X x X + H_P1 x |1><1|.
    """

    def __init__(self, H_I, H_X, H_P1, delta_t):
        """
        Initialize a Zeno gadget specification.

        Args:
            H_I: LocalHamiltonian acting with the ancilla identity
            H_X: LocalHamiltonian coupled through ancilla X
            H_P1: LocalHamiltonian coupled through ancilla |1><1|
            delta_t: Measurement interval; omega = 2 pi / delta_t
        """
        if not delta_t > 0:
            raise ConfigError(f"delta_t must be positive, got {delta_t}")
        layouts = {H_I.layout, H_X.layout, H_P1.layout}
        if len(layouts) != 1:
            raise ConfigError("H_I, H_X and H_P1 must share one layout")
        self.H_I = H_I
        self.H_X = H_X
        self.H_P1 = H_P1
        self.delta_t = float(delta_t)
        self.ratios = {}

    @property
    def omega(self):
        return 2.0 * math.pi / self.delta_t

    @property
    def layout(self):
        return self.H_I.layout

    def __str__(self):
        return f"ZenoGadgetSpec(n={self.layout.n_sites}, delta_t={self.delta_t:g})"


class SimulationTask:
    """
    What a simulator must reproduce: states, normalized observables, a time
    horizon and an error target.
    """

    def __init__(self, states, observables, t_max, target_eps, labels=None):
        """
        Initialize a simulation task.

        Args:
            states: List of density operators or state vectors
            observables: List of Hermitian matrices; each is rescaled to unit norm
            t_max: Time horizon
            target_eps: Error the simulator must stay within
            labels: Optional observable names
        """
        if t_max <= 0:
            raise ConfigError(f"t_max must be positive, got {t_max}")
        if target_eps < 0:
            raise ConfigError(f"target_eps must be non-negative, got {target_eps}")
        self.states = list(states)
        self.observables = []
        for index, O in enumerate(observables):
            O = np.asarray(O, dtype=complex)
            norm = float(np.linalg.norm(O, 2))
            if norm == 0:
                raise ConfigError(f"Observable {index} is zero")
            self.observables.append(O / norm)
        if labels is None:
            labels = [f"O{i}" for i in range(len(self.observables))]
        if len(labels) != len(self.observables):
            raise ConfigError("One label per observable is required")
        self.labels = list(labels)
        self.t_max = float(t_max)
        self.target_eps = float(target_eps)

    def __str__(self):
        return f"SimulationTask({len(self.states)} states, {len(self.observables)} observables, t_max={self.t_max:g})"


class Channel:
    """
    Quantum channel on density operators.
    """

    # Channel kinds
    UNITARY = "unitary-conjugation"
    DEPHASING = "ancilla-dephasing"
    COMPOSITION = "composition"
    DEPOLARIZING = "depolarizing"

    def __init__(self, kind, unitary=None, ancilla_dim=2, channels=None, p=0.0):
        """
        Initialize a channel.

        Args:
            kind: One of the class constants
            unitary: Matrix for unitary conjugation
            ancilla_dim: Dimension of the trailing ancilla for dephasing
            channels: Channels applied in order, for composition
            p: Depolarizing strength in [0, 1]
        """
        if kind not in (self.UNITARY, self.DEPHASING, self.COMPOSITION, self.DEPOLARIZING):
            raise ConfigError(f"Unknown channel kind: {kind}")
        if kind == self.UNITARY and unitary is None:
            raise ConfigError("Unitary conjugation needs a unitary")
        if kind == self.COMPOSITION and not channels:
            raise ConfigError("Composition needs at least one channel")
        if kind == self.DEPOLARIZING and not 0.0 <= p <= 1.0:
            raise ConfigError(f"Depolarizing strength must lie in [0, 1], got {p}")
        self.kind = kind
        self.unitary = None if unitary is None else np.asarray(unitary, dtype=complex)
        self.ancilla_dim = ancilla_dim
        self.channels = list(channels or [])
        self.p = p

    @classmethod
    def unitary_conjugation(cls, U):
        return cls(cls.UNITARY, unitary=U)

    @classmethod
    def ancilla_dephasing(cls, ancilla_dim=2):
        return cls(cls.DEPHASING, ancilla_dim=ancilla_dim)

    @classmethod
    def composition(cls, *channels):
        return cls(cls.COMPOSITION, channels=channels)

    @classmethod
    def depolarizing(cls, p):
        return cls(cls.DEPOLARIZING, p=p)

    def apply(self, rho):
        """
        Apply the channel to a density operator.
        """
        rho = np.asarray(rho, dtype=complex)
        if self.kind == self.UNITARY:
            return self.unitary @ rho @ self.unitary.conj().T
        if self.kind == self.DEPHASING:
            d = self.ancilla_dim
            system = rho.shape[0] // d
            blocks = rho.reshape(system, d, system, d)
            keep = np.eye(d, dtype=bool)[None, :, None, :]
            return np.where(keep, blocks, 0.0).reshape(rho.shape)
        if self.kind == self.DEPOLARIZING:
            dim = rho.shape[0]
            return (1.0 - self.p) * rho + self.p * np.trace(rho) * np.eye(dim) / dim
        for channel in self.channels:
            rho = channel.apply(rho)
        return rho

    def __str__(self):
        if self.kind == self.COMPOSITION:
            return "Channel(" + " -> ".join(str(c) for c in self.channels) + ")"
        return f"Channel({self.kind})"
