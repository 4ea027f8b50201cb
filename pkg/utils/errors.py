"""
Exception hierarchy for the gadget toolkit.

Every error carries an exit code used by the command-line runner and a
stable machine-readable code string.
"""


class GadgetLabError(Exception):
    """
    Base class for all toolkit errors.
    """

    exit_code = 1
    code = "error"

    def to_dict(self):
        """
        Machine-readable form of the error.

        Returns:
            Dictionary with error code, message and exit code
        """
        return {"error": self.code, "message": str(self), "exit_code": self.exit_code}


class ConfigError(GadgetLabError):
    """
    Invalid configuration or invalid input values.
    """

    exit_code = 2
    code = "invalid-input"


class SchemaError(ConfigError):
    """
    Experiment config does not match the schema of its kind.
    """

    code = "schema"


class DimensionError(GadgetLabError):
    """
    Hilbert-space dimension exceeds the configured cap.
    """

    exit_code = 3
    code = "dimension"


class NumericalError(GadgetLabError):
    """
    A numerical precondition failed at run time.
    """

    exit_code = 4
    code = "numerical"


class AmbiguityError(NumericalError):
    """
    An eigenvalue lies within tolerance of a spectral cut.
    """

    code = "ambiguity"


class RankMismatchError(NumericalError):
    code = "rank-mismatch"


class RotationUndefinedError(NumericalError):
    code = "rotation-undefined"


class BlockConditionError(NumericalError):
    code = "block-condition"


class HypothesisError(NumericalError):
    code = "hypothesis"


class FitError(NumericalError):
    code = "fit"
