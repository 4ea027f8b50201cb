"""
Direct rotation model.
"""
import numpy as np


class DirectRotation:
    """
    Minimal unitary W carrying projector P onto projector Q, with W = e^S.
    """

    def __init__(self, W, S, source, target):
        """
        Initialize a direct rotation.

        Args:
            W: Unitary ndarray with W P W^dagger = Q
            S: Anti-Hermitian generator, block off-diagonal for P and Q
            source: Projector P
            target: Projector Q
        """
        self.W = W
        self.S = S
        self.source = source
        self.target = target

    def distance_from_identity(self):
        return float(np.linalg.norm(self.W - np.eye(self.W.shape[0]), 2))

    def generator_norm(self):
        return float(np.linalg.norm(self.S, 2))

    def __str__(self):
        return f"DirectRotation(dim={self.W.shape[0]}, ||W-I||={self.distance_from_identity():.3e})"
