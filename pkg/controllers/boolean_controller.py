"""
Boolean function controller for the gadget toolkit.
Handles Walsh expansions, the R difference operator and the separation of
k-local functions from k'-local ones used by the energy-scaling bound.
"""
import logging

import numpy as np
from scipy.optimize import linprog

from models.boolean import BoolFun
from utils.errors import ConfigError, NumericalError

logger = logging.getLogger(__name__)

MAX_INPUTS = 16
MAX_MINIMAX_INPUTS = 10


def _popcount(indices):
    counts = np.zeros_like(indices)
    remaining = indices.copy()
    while np.any(remaining):
        counts += remaining & 1
        remaining >>= 1
    return counts


def fwht(values):
    """
    Unnormalized fast Walsh-Hadamard transform of a length-2^n vector.

    Entry S of the result is sum_x (-1)^{|S & x|} values[x].
    """
    result = np.array(values, dtype=float)
    h = 1
    while h < result.size:
        pairs = result.reshape(-1, 2, h)
        upper = pairs[:, 0, :] + pairs[:, 1, :]
        lower = pairs[:, 0, :] - pairs[:, 1, :]
        result = np.stack([upper, lower], axis=1).reshape(-1)
        h *= 2
    return result


class BooleanController:
    """
    Controller for real functions on {0,1}^n.
    """

    def __init__(self, settings):
        """
        Initialize the Boolean function controller.

        Args:
            settings: Settings instance
        """
        self.settings = settings

    def _check_size(self, f, limit=MAX_INPUTS):
        if f.n > limit:
            raise ConfigError(f"Function on {f.n} inputs exceeds the limit of {limit}")

    def bool_walsh(self, f):
        """
        Walsh coefficients f_hat(S) = 2^{-n} sum_x (-1)^{|S & x|} f(x).

        S is indexed like the table: bit i of the index (x_1 most significant)
        marks membership of input i.

        Args:
            f: BoolFun

        Returns:
            ndarray of 2^n coefficients
        """
        self._check_size(f)
        return fwht(f.table) / f.table.size

    def locality(self, f, tol=1e-10):
        """
        Size of the largest set carrying a nonzero Walsh coefficient.
        """
        coefficients = self.bool_walsh(f)
        sizes = _popcount(np.arange(coefficients.size))
        scale = max(1.0, float(np.max(np.abs(f.table), initial=0.0)))
        active = np.abs(coefficients) > tol * scale
        return int(sizes[active].max()) if np.any(active) else 0

    def bool_klocal_check(self, f, k):
        """
        Whether f is a sum of functions of at most k inputs each.

        Args:
            f: BoolFun
            k: Locality

        Returns:
            True iff the Walsh expansion of f lives on sets of size <= k
        """
        return self.locality(f) <= k

    def bool_reduce_R(self, f):
        """
        Rf(x_1..x_{n-1}) = f(x_1..x_{n-1}, 0) - f(x_1..x_{n-1}, 1).
        """
        if f.n == 0:
            raise ConfigError("R needs at least one input")
        pairs = f.table.reshape(-1, 2)
        return BoolFun(f.n - 1, pairs[:, 0] - pairs[:, 1])

    def bool_reduce_R_iter(self, f, r):
        """
        R applied r times: sum over the last r inputs y of (-1)^{|y|} f(x, y).
        """
        if not 0 <= r <= f.n:
            raise ConfigError(f"Cannot apply R {r} times to a function of {f.n} inputs")
        if r == 0:
            return BoolFun(f.n, f.table.copy())
        signs = (-1.0) ** _popcount(np.arange(2 ** r))
        return BoolFun(f.n - r, f.table.reshape(-1, 2 ** r) @ signs)

    def bool_proof_function(self, n, k, k_prime):
        """
        k-local function far from every k'-local one.

        f(x) = (-1)^{x_1 + ... + x_{k-k'}} when the last k' inputs are zero,
        and 0 otherwise; R^{k'} f recovers the parity part.

        Args:
            n: Number of inputs
            k: Locality of f
            k_prime: Locality it is separated from

        Returns:
            BoolFun
        """
        if not 0 < k_prime < k <= n:
            raise ConfigError(f"Need 0 < k' < k <= n, got n={n}, k={k}, k'={k_prime}")
        if n > MAX_INPUTS:
            raise ConfigError(f"Function on {n} inputs exceeds the limit of {MAX_INPUTS}")
        index = np.arange(2 ** n)
        head = index >> k_prime
        parity_bits = head >> (n - k)
        parity = (-1.0) ** _popcount(parity_bits)
        tail_zero = (index & (2 ** k_prime - 1)) == 0
        return BoolFun(n, np.where(tail_zero, parity, 0.0))

    def bool_separation_bound(self, f, k_prime):
        """
        Certified lower bound on min over k'-local g of max_x |f(x) - g(x)|.

        R^{k'} g is constant for k'-local g while R^{k'} mixes 2^{k'} values,
        so the spread of R^{k'} f bounds the distance from below.

        Returns:
            (max R^{k'} f - min R^{k'} f) / (2 * 2^{k'})
        """
        self._check_size(f)
        reduced = self.bool_reduce_R_iter(f, k_prime)
        spread = float(reduced.table.max() - reduced.table.min())
        return spread / (2.0 * 2 ** k_prime)

    def bool_minimax(self, f, k_prime):
        """
        Exact min over k'-local g of max_x |f(x) - g(x)|.

        Solved as a linear program over the Walsh characters of size <= k'
        plus the error level t.

        Args:
            f: BoolFun with n <= 10
            k_prime: Locality of the approximants

        Returns:
            Dictionary with distance and the optimal approximant table
        """
        self._check_size(f, MAX_MINIMAX_INPUTS)
        if k_prime < 0:
            raise ConfigError(f"k' must be non-negative, got {k_prime}")
        points = np.arange(2 ** f.n)
        subsets = points[_popcount(points) <= k_prime]
        # characters[x, j] = (-1)^{|x & S_j|}
        characters = (-1.0) ** _popcount(points[:, None] & subsets[None, :])
        m = subsets.size
        ones = np.ones((points.size, 1))
        # f - chi c <= t  and  chi c - f <= t
        A_ub = np.vstack([np.hstack([-characters, -ones]), np.hstack([characters, -ones])])
        b_ub = np.concatenate([-f.table, f.table])
        cost = np.zeros(m + 1)
        cost[-1] = 1.0
        bounds = [(None, None)] * m + [(0, None)]

        result = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if not result.success:
            raise NumericalError(f"Minimax linear program failed: {result.message}")
        approximant = characters @ result.x[:m]
        logger.debug("Minimax distance of %s to %d-local functions: %.6f", f, k_prime, result.x[-1])
        return {"distance": float(result.x[-1]), "approximant": BoolFun(f.n, approximant)}
