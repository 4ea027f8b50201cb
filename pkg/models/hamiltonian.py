"""
Local Hamiltonian models.
"""
import numpy as np

from models.operator import DenseOperator, SiteLayout
from utils.errors import ConfigError


class LocalTerm:
    """
    Hermitian operator acting on an ordered set of sites.
    """

    def __init__(self, operator, support, label=""):
        """
        Initialize a local term.

        Args:
            operator: DenseOperator or array on the supported sites, in support order
            support: Ordered list of site indices
            label: Human-readable label (e.g. "ZZ")
        """
        if not isinstance(operator, DenseOperator):
            operator = DenseOperator(operator, hermitian=True)
        elif not operator.hermitian:
            operator = DenseOperator(operator.matrix, hermitian=True)
        support = tuple(int(s) for s in support)
        if len(set(support)) != len(support):
            raise ConfigError(f"Term support has repeated sites: {list(support)}")
        self.operator = operator
        self.support = support
        self.label = label

    def norm(self):
        return float(np.linalg.norm(self.operator.matrix, 2))

    def is_zero(self):
        return not np.any(self.operator.matrix)

    def __str__(self):
        return f"{self.label or 'term'} on {list(self.support)}"


class InteractionHypergraph:
    """
    Sites as vertices, term supports as hyperedges.
    """

    def __init__(self, n_sites, hyperedges=None):
        """
        Initialize the hypergraph.

        Args:
            n_sites: Number of vertices
            hyperedges: Iterable of site tuples
        """
        self.vertices = tuple(range(n_sites))
        self.hyperedges = []
        self._degrees = [0] * n_sites
        for edge in hyperedges or []:
            self.add_edge(edge)

    def add_edge(self, edge):
        edge = tuple(edge)
        self.hyperedges.append(edge)
        for site in edge:
            self._degrees[site] += 1

    def degree(self, vertex):
        return self._degrees[vertex]

    def max_degree(self):
        return max(self._degrees, default=0)

    def locality(self):
        return max((len(e) for e in self.hyperedges), default=0)


class LocalHamiltonian:
    """
    Sum of local terms over a site layout.
    """

    def __init__(self, layout, terms=None):
        """
        Initialize a local Hamiltonian.

        Args:
            layout: SiteLayout or list of site dimensions
            terms: Optional list of LocalTerm
        """
        self.layout = layout if isinstance(layout, SiteLayout) else SiteLayout(layout)
        self.terms = []
        self.hypergraph = InteractionHypergraph(self.layout.n_sites)
        for term in terms or []:
            self.add_term(term)

    def add_term(self, term):
        """
        Append a term, dropping it if its operator is zero.

        Args:
            term: LocalTerm

        Returns:
            True if the term was kept
        """
        for site in term.support:
            if not 0 <= site < self.layout.n_sites:
                raise ConfigError(f"Term {term} uses site {site} outside the layout")
        expected = int(np.prod([self.layout.dims[s] for s in term.support], dtype=np.int64))
        if term.operator.dim != expected:
            raise ConfigError(f"Term {term} has dim {term.operator.dim}, support needs {expected}")
        if term.is_zero():
            return False
        self.terms.append(term)
        self.hypergraph.add_edge(term.support)
        return True

    @property
    def n_sites(self):
        return self.layout.n_sites

    @property
    def locality(self):
        return self.hypergraph.locality()

    def max_term_norm(self):
        return max((t.norm() for t in self.terms), default=0.0)

    def __str__(self):
        return f"LocalHamiltonian({self.layout}, {len(self.terms)} terms, k={self.locality})"
