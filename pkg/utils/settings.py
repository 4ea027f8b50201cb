"""
Runtime settings shared by all controllers.
"""
import logging
import os

from utils.errors import ConfigError
from utils.validation import validate_int

VERSION = "0.1.0"
DEFAULT_DIM_CAP = 2 ** 13


class Settings:
    """
    Numerical tolerances and resource limits.
    """

    def __init__(self, dim_cap=DEFAULT_DIM_CAP, hermitian_tol=1e-12, degeneracy_tol=1e-8,
                 unitary_tol=1e-10, block_tol=1e-10, noise_floor=1e-12, log_level="WARNING"):
        """
        Initialize the settings.

        Args:
            dim_cap: Largest Hilbert-space dimension any operation accepts
            hermitian_tol: Relative tolerance for Hermiticity checks
            degeneracy_tol: Distance below which an eigenvalue counts as sitting on a cut
            unitary_tol: Tolerance for unitarity and isometry checks
            block_tol: Tolerance for gadget block conditions
            noise_floor: Values below this are discarded from log-log fits
            log_level: Logging level name
        """
        self.dim_cap = dim_cap
        self.hermitian_tol = hermitian_tol
        self.degeneracy_tol = degeneracy_tol
        self.unitary_tol = unitary_tol
        self.block_tol = block_tol
        self.noise_floor = noise_floor
        self.log_level = log_level

    @classmethod
    def from_env(cls, environ=None):
        """
        Build settings from environment variables.

        Args:
            environ: Mapping to read instead of os.environ

        Returns:
            Settings instance
        """
        environ = os.environ if environ is None else environ
        settings = cls()

        raw_cap = environ.get("GADGETLAB_DIM_CAP")
        if raw_cap is not None:
            cap = validate_int(raw_cap)
            if cap is None or cap < 2:
                raise ConfigError(f"GADGETLAB_DIM_CAP must be an integer >= 2, got {raw_cap!r}")
            settings.dim_cap = cap

        level = environ.get("GADGETLAB_LOG_LEVEL")
        if level:
            if not isinstance(logging.getLevelName(level.upper()), int):
                raise ConfigError(f"Unknown log level: {level}")
            settings.log_level = level.upper()

        return settings
