"""
Operator models: dense matrices, Pauli strings and site layouts.
"""
import numpy as np

from utils.errors import ConfigError, DimensionError

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit Pauli products: (a, b) -> (phase, c) with a.b = phase * c
_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


class DenseOperator:
    """
    Immutable dim x dim complex matrix with a Hermiticity hint.
    """

    def __init__(self, matrix, hermitian=False, tol=1e-12):
        """
        Initialize a dense operator.

        Args:
            matrix: Square array-like
            hermitian: Whether the operator is declared Hermitian
            tol: Relative tolerance for the Hermiticity check
        """
        array = np.array(matrix, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ConfigError(f"Operator must be a square matrix, got shape {array.shape}")
        if hermitian:
            scale = max(1.0, float(np.max(np.abs(array)))) if array.size else 1.0
            if np.max(np.abs(array - array.conj().T), initial=0.0) > tol * scale:
                raise ConfigError("Operator declared Hermitian but A != A^dagger")
        array.flags.writeable = False
        self.matrix = array
        self.hermitian = hermitian

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def dagger(self):
        return DenseOperator(self.matrix.conj().T, hermitian=self.hermitian)

    def __matmul__(self, other):
        return DenseOperator(self.matrix @ np.asarray(other))

    def __add__(self, other):
        both = self.hermitian and getattr(other, "hermitian", False)
        return DenseOperator(self.matrix + np.asarray(other), hermitian=both)

    def __sub__(self, other):
        both = self.hermitian and getattr(other, "hermitian", False)
        return DenseOperator(self.matrix - np.asarray(other), hermitian=both)

    def __mul__(self, scalar):
        real = np.isrealobj(scalar) or np.imag(scalar) == 0
        return DenseOperator(self.matrix * scalar, hermitian=self.hermitian and real)

    __rmul__ = __mul__

    def __str__(self):
        kind = "Hermitian" if self.hermitian else "general"
        return f"DenseOperator(dim={self.dim}, {kind})"


class SiteLayout:
    """
    Per-site local dimensions of a many-body Hilbert space.
    """

    def __init__(self, dims):
        """
        Initialize a site layout.

        Args:
            dims: List of local dimensions (2 for qubits, 3 for qutrits)
        """
        dims = [int(d) for d in dims]
        if any(d < 2 for d in dims):
            raise ConfigError(f"All site dimensions must be >= 2, got {dims}")
        self.dims = tuple(dims)

    @classmethod
    def qubits(cls, n):
        return cls([2] * n)

    @property
    def n_sites(self):
        return len(self.dims)

    @property
    def total_dim(self):
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def is_qubit_layout(self):
        return all(d == 2 for d in self.dims)

    def check_cap(self, cap):
        """
        Raise if the total dimension exceeds the cap.

        Args:
            cap: Largest allowed dimension
        """
        if self.total_dim > cap:
            raise DimensionError(f"Layout {list(self.dims)} has dimension {self.total_dim} > cap {cap}")

    def extended(self, extra_dims):
        """
        Layout with additional sites appended.

        Args:
            extra_dims: Dimensions of the appended sites

        Returns:
            New SiteLayout
        """
        return SiteLayout(list(self.dims) + list(extra_dims))

    def __eq__(self, other):
        return isinstance(other, SiteLayout) and self.dims == other.dims

    def __hash__(self):
        return hash(self.dims)

    def __str__(self):
        return f"SiteLayout({list(self.dims)})"


class PauliString:
    """
    Real-weighted tensor product of single-qubit Paulis.
    """

    def __init__(self, coefficient=1.0, factors=None, n_sites=1):
        """
        Initialize a Pauli string.

        Args:
            coefficient: Real weight
            factors: Mapping site index -> 'I', 'X', 'Y' or 'Z'
            n_sites: Number of sites the string is defined on
        """
        if np.iscomplexobj(coefficient) and np.imag(coefficient) != 0:
            raise ConfigError("Pauli string coefficients must be real")
        factors = dict(factors or {})
        for site, letter in factors.items():
            if letter not in PAULI_MATRICES:
                raise ConfigError(f"Unknown Pauli factor {letter!r} on site {site}")
            if not 0 <= site < n_sites:
                raise ConfigError(f"Site {site} out of range for {n_sites} sites")
        self.coefficient = float(np.real(coefficient))
        # Identity factors carry no information
        self.factors = {s: p for s, p in sorted(factors.items()) if p != "I"}
        self.n_sites = n_sites

    @classmethod
    def from_label(cls, label, coefficient=1.0):
        """
        Build a string from a label such as "ZIZ".

        Args:
            label: One letter per site
            coefficient: Real weight

        Returns:
            PauliString on len(label) sites
        """
        return cls(coefficient, {i: p for i, p in enumerate(label.upper())}, len(label))

    @property
    def support(self):
        return tuple(self.factors)

    def label(self):
        return "".join(self.factors.get(i, "I") for i in range(self.n_sites))

    def commutes_with(self, other):
        """
        Whether the two strings commute.

        Returns:
            True if they anticommute on an even number of sites
        """
        clashes = 0
        for site, letter in self.factors.items():
            theirs = other.factors.get(site)
            if theirs is not None and theirs != letter:
                clashes += 1
        return clashes % 2 == 0

    def multiply(self, other):
        """
        Product of two commuting strings.

        Commuting Pauli strings multiply to a Hermitian string with a real
        coefficient.

        Args:
            other: PauliString on the same number of sites

        Returns:
            PauliString
        """
        if other.n_sites != self.n_sites:
            raise ConfigError("Pauli strings live on different numbers of sites")
        if not self.commutes_with(other):
            raise ConfigError("Product of anticommuting strings is not Hermitian")
        phase = 1
        factors = {}
        for site in set(self.factors) | set(other.factors):
            step, letter = _PAULI_PRODUCT[(self.factors.get(site, "I"), other.factors.get(site, "I"))]
            phase *= step
            factors[site] = letter
        return PauliString(self.coefficient * other.coefficient * np.real(phase), factors, self.n_sites)

    def __str__(self):
        return f"{self.coefficient:+g}*{self.label()}"
