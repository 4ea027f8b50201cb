"""
Gadget models: instances and their verification witnesses.
"""


class GadgetWitness:
    """
    Certificate that a gadget meets the (eta, eps) or (Delta, eta, eps)
    definition for an ancilla projector P and a unitary U.
    """

    def __init__(self, P, U, eta, eps, delta=None, S=None, P_prime=None, gadget_norm=None):
        """
        Initialize a witness.

        Args:
            P: Projector on the ancilla space
            U: Unitary on the joint space with P' = U (I x P) U^dagger
            eta: ||U - I||
            eps: ||P' H' P' - U (H x P) U^dagger||
            delta: Energy cut when P' is the low-energy projector of H'
            S: Generator with U = e^S, when U is a direct rotation
            P_prime: Joint-space projector P'
            gadget_norm: ||H'||
        """
        self.P = P
        self.U = U
        self.eta = eta
        self.eps = eps
        self.delta = delta
        self.S = S
        self.P_prime = P_prime
        self.gadget_norm = gadget_norm

    def to_dict(self):
        return {"eta": float(self.eta), "eps": float(self.eps)}

    def __str__(self):
        cut = f", delta={self.delta:g}" if self.delta is not None else ""
        return f"GadgetWitness(eta={self.eta:.3e}, eps={self.eps:.3e}{cut})"


class GadgetInstance:
    """
    Target Hamiltonian together with a gadget Hamiltonian on target plus
    ancilla sites.
    """

    # Construction kinds
    FIRST_ORDER = "first-order"
    SECOND_ORDER = "second-order"
    THIRD_ORDER = "third-order"
    SUBDIVISION = "subdivision"
    THREE_TO_TWO = "three-to-two"
    EXACT_THREE_TO_TWO = "exact-three-to-two"

    def __init__(self, target, gadget, ancilla_sites, kind, delta=None, witness=None, diagnostics=None):
        """
        Initialize a gadget instance.

        Args:
            target: LocalHamiltonian H on the system sites
            gadget: LocalHamiltonian H' on the system sites followed by ancilla sites
            ancilla_sites: Indices of the ancilla sites in the gadget layout
            kind: Construction kind (class constants above)
            delta: Energy scale used by the construction
            witness: Optional GadgetWitness
            diagnostics: Construction-time quantities (e.g. block residuals)
        """
        self.target = target
        self.gadget = gadget
        self.ancilla_sites = list(ancilla_sites)
        self.kind = kind
        self.delta = delta
        self.witness = witness
        self.diagnostics = dict(diagnostics or {})

    @property
    def n_system(self):
        return self.target.n_sites

    @property
    def ancilla_dim(self):
        dims = self.gadget.layout.dims
        result = 1
        for site in self.ancilla_sites:
            result *= dims[site]
        return result

    def __str__(self):
        return f"GadgetInstance({self.kind}, {self.n_system} system + {len(self.ancilla_sites)} ancilla)"
