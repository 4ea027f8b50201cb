"""
Seeded random operators and states for property checks.
"""
import numpy as np
from scipy.stats import unitary_group


def random_hermitian(rng, dim, scale=1.0):
    """
    Draw a Hermitian matrix with Gaussian entries.

    Args:
        rng: numpy Generator
        dim: Matrix dimension
        scale: Operator norm of the result

    Returns:
        dim x dim Hermitian array with operator norm `scale`
    """
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    herm = (raw + raw.conj().T) / 2.0
    norm = np.linalg.norm(herm, 2)
    return herm * (scale / norm) if norm > 0 else herm


def random_unitary(rng, dim):
    """
    Draw a Haar-random unitary.

    Args:
        rng: numpy Generator
        dim: Matrix dimension

    Returns:
        dim x dim unitary array
    """
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_state(rng, dim):
    """
    Draw a normalized pure state vector.
    """
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


def random_density(rng, dim, rank=None):
    """
    Draw a density matrix of the given rank (full rank by default).

    Args:
        rng: numpy Generator
        dim: Matrix dimension
        rank: Number of mixed pure states

    Returns:
        dim x dim density matrix
    """
    rank = dim if rank is None else rank
    mix = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = mix @ mix.conj().T
    return rho / np.trace(rho).real


def random_projector(rng, dim, rank):
    """
    Draw a projector onto a Haar-random subspace of the given rank.
    """
    basis = random_unitary(rng, dim)[:, :rank]
    return basis @ basis.conj().T
