"""
Boolean function model.
"""
import numpy as np

from utils.errors import ConfigError


class BoolFun:
    """
    Real-valued function on {0,1}^n stored as a table.

    Entry i holds f(x) for x_1 ... x_n the binary digits of i, x_1 most
    significant, so the last input is the lowest bit.
    """

    def __init__(self, n, table):
        """
        Initialize a Boolean function.

        Args:
            n: Number of inputs
            table: 2^n real values
        """
        table = np.asarray(table, dtype=float).reshape(-1)
        if n < 0 or table.size != 2 ** n:
            raise ConfigError(f"Table of length {table.size} does not match n={n}")
        self.n = n
        self.table = table

    def __call__(self, bits):
        index = 0
        for bit in bits:
            index = 2 * index + int(bit)
        return float(self.table[index])

    def __str__(self):
        return f"BoolFun(n={self.n})"
