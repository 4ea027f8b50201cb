"""
Operator controller for the gadget toolkit.
Handles dense operator algebra: Pauli embedding, eigendecomposition,
exponentials, norms, projectors and partial traces.
"""
import logging

import numpy as np

from models.operator import PAULI_MATRICES, DenseOperator, SiteLayout
from utils.errors import AmbiguityError, ConfigError, DimensionError, GadgetLabError, NumericalError

logger = logging.getLogger(__name__)


def as_array(A):
    """
    View any operator-like input as a complex ndarray.
    """
    return np.asarray(A, dtype=complex)


class OperatorController:
    """
    Controller for dense operator operations.
    """

    def __init__(self, settings):
        """
        Initialize the operator controller.

        Args:
            settings: Settings instance
        """
        self.settings = settings

    def check_dim(self, dim):
        """
        Refuse dimensions above the configured cap.

        Args:
            dim: Hilbert-space dimension
        """
        if dim > self.settings.dim_cap:
            raise DimensionError(f"Dimension {dim} exceeds cap {self.settings.dim_cap}")

    def check_hermitian(self, A, name="operator"):
        """
        Validate Hermiticity to the configured relative tolerance.

        Args:
            A: Operator-like
            name: Name for error messages

        Returns:
            The operator as an ndarray
        """
        matrix = as_array(A)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ConfigError(f"{name} must be square, got shape {matrix.shape}")
        self.check_dim(matrix.shape[0])
        scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
        if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > self.settings.hermitian_tol * scale * 10:
            raise ConfigError(f"{name} is not Hermitian")
        return matrix

    def check_projector(self, P, name="projector"):
        """
        Validate that P is an orthogonal projector.

        Returns:
            The projector as an ndarray
        """
        matrix = self.check_hermitian(P, name)
        if np.linalg.norm(matrix @ matrix - matrix, 2) > 1e-8:
            raise ConfigError(f"{name} is not idempotent")
        return matrix

    def projector_rank(self, P):
        return int(round(float(np.trace(as_array(P)).real)))

    def pauli_embed(self, p, layout):
        """
        Embed a Pauli string into the full Hilbert space of a layout.

        Args:
            p: PauliString
            layout: SiteLayout

        Returns:
            Hermitian DenseOperator
        """
        if p.n_sites != layout.n_sites:
            raise ConfigError(f"Pauli string has {p.n_sites} sites, layout has {layout.n_sites}")
        for site in p.support:
            if layout.dims[site] != 2:
                raise ConfigError(f"Pauli factor on non-qubit site {site}")
        layout.check_cap(self.settings.dim_cap)

        # Kronecker product, site 0 most significant
        result = np.ones((1, 1), dtype=complex)
        for site, d in enumerate(layout.dims):
            letter = p.factors.get(site)
            factor = PAULI_MATRICES[letter] if letter else np.eye(d, dtype=complex)
            result = np.kron(result, factor)
        return DenseOperator(p.coefficient * result, hermitian=True)

    def herm_eig(self, A):
        """
        Hermitian eigendecomposition.

        Args:
            A: Hermitian operator

        Returns:
            (eigenvalues ascending, unitary eigenvector matrix)
        """
        matrix = self.check_hermitian(A)
        # Symmetrize away rounding asymmetry before calling LAPACK
        eigenvalues, eigenvectors = np.linalg.eigh((matrix + matrix.conj().T) / 2.0)
        return eigenvalues, eigenvectors

    def expm_ih(self, H, t):
        """
        Unitary e^{-itH} via the eigendecomposition of H.

        Args:
            H: Hermitian operator
            t: Evolution time

        Returns:
            Unitary DenseOperator
        """
        return DenseOperator(self.evolution_matrix(H, t))

    def evolution_matrix(self, H, t):
        """
        Same as expm_ih but returns a bare ndarray.
        """
        eigenvalues, eigenvectors = self.herm_eig(H)
        phases = np.exp(-1j * t * eigenvalues)
        return (eigenvectors * phases) @ eigenvectors.conj().T

    def op_norm(self, A):
        """
        Largest singular value.
        """
        matrix = as_array(A)
        if matrix.size == 0:
            return 0.0
        return float(np.linalg.norm(matrix, 2))

    def trace_norm(self, A):
        """
        Sum of singular values.
        """
        matrix = as_array(A)
        if matrix.size == 0:
            return 0.0
        return float(np.linalg.norm(matrix, "nuc"))

    def low_energy_projector(self, H, delta):
        """
        Projector onto the eigenvectors of H with eigenvalue <= delta.

        Args:
            H: Hermitian operator
            delta: Energy cut

        Returns:
            Projector as a Hermitian DenseOperator
        """
        eigenvalues, eigenvectors = self.herm_eig(H)
        gaps = np.abs(eigenvalues - delta)
        if gaps.size and gaps.min() < self.settings.degeneracy_tol:
            raise AmbiguityError(
                f"Eigenvalue {eigenvalues[gaps.argmin()]:.12g} lies within "
                f"{self.settings.degeneracy_tol:g} of the cut {delta:g}; move the cut"
            )
        low = eigenvectors[:, eigenvalues <= delta]
        logger.debug("Low-energy projector below %g has rank %d", delta, low.shape[1])
        return DenseOperator(low @ low.conj().T, hermitian=True)

    def spectral_distance(self, A, B):
        """
        Largest gap between sorted spectra of two Hermitian operators.

        Args:
            A: Hermitian operator
            B: Hermitian operator of equal dimension

        Returns:
            max_j |lambda_j(A) - lambda_j(B)|
        """
        a = self.check_hermitian(A, "A")
        b = self.check_hermitian(B, "B")
        if a.shape != b.shape:
            raise ConfigError(f"Dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
        if a.shape[0] == 0:
            return 0.0
        distance = float(np.max(np.abs(np.linalg.eigvalsh(a) - np.linalg.eigvalsh(b))))
        weyl = self.op_norm(a - b)
        if distance > weyl + 1e-9 * (1.0 + weyl):
            raise NumericalError(f"Weyl inequality violated: spectral distance {distance:.6g} > ||A - B|| = {weyl:.6g}")
        return distance

    def partial_trace(self, A, layout, keep):
        """
        Trace out every site not listed in keep.

        Args:
            A: Operator on the full layout
            layout: SiteLayout
            keep: Iterable of site indices to keep

        Returns:
            DenseOperator on the kept sites, in increasing site order
        """
        try:
            matrix = as_array(A)
            if matrix.shape != (layout.total_dim, layout.total_dim):
                raise ConfigError(f"Operator of dim {matrix.shape[0]} does not match layout {list(layout.dims)}")
            keep = sorted(set(keep))
            n = layout.n_sites
            for site in keep:
                if not 0 <= site < n:
                    raise ConfigError(f"Site {site} outside layout")

            tensor = matrix.reshape(layout.dims + layout.dims)
            # Trace out from the highest site down so axis numbers stay valid
            remaining = n
            for site in reversed(range(n)):
                if site in keep:
                    continue
                tensor = np.trace(tensor, axis1=site, axis2=site + remaining)
                remaining -= 1
            kept_dim = int(np.prod([layout.dims[s] for s in keep], dtype=np.int64)) if keep else 1
            return DenseOperator(tensor.reshape(kept_dim, kept_dim))
        except GadgetLabError:
            raise
        except Exception as e:
            raise ConfigError(f"Error computing partial trace: {str(e)}") from e

    def restricted_spectrum(self, A, P):
        """
        Eigenvalues of A restricted to the range of the projector P.

        Args:
            A: Hermitian operator
            P: Projector

        Returns:
            Ascending eigenvalues, one per dimension of range(P)
        """
        basis = self.range_basis(P)
        matrix = as_array(A)
        restricted = basis.conj().T @ matrix @ basis
        return np.linalg.eigvalsh((restricted + restricted.conj().T) / 2.0)

    def range_basis(self, P):
        """
        Orthonormal basis (columns) of the range of a projector.
        """
        eigenvalues, eigenvectors = np.linalg.eigh(as_array(P))
        return eigenvectors[:, eigenvalues > 0.5]

    def site_layout(self, dims):
        """
        Build a layout and check it against the cap.
        """
        layout = SiteLayout(dims)
        layout.check_cap(self.settings.dim_cap)
        return layout
