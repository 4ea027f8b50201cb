"""
Validation utilities for configs and numerical inputs.
"""
import math

from utils.errors import SchemaError


def validate_int(value):
    """
    Validate that a value is a valid integer.

    Args:
        value: Value to validate

    Returns:
        Validated integer or None
    """
    if isinstance(value, bool):
        return None
    try:
        if value == "":
            return None
        if isinstance(value, float) and not value.is_integer():
            return None
        return int(value)
    except (ValueError, TypeError):
        return None


def validate_float(value):
    """
    Validate that a value is a valid finite float.

    Args:
        value: Value to validate

    Returns:
        Validated float or None
    """
    if isinstance(value, bool):
        return None
    try:
        if value == "":
            return None
        number = float(value)
    except (ValueError, TypeError):
        return None
    if not math.isfinite(number):
        return None
    return number


class Field:
    """
    One entry of a config schema.
    """

    INT = "int"
    FLOAT = "float"
    STR = "str"
    BOOL = "bool"
    FLOAT_LIST = "float_list"
    INT_LIST = "int_list"
    STR_LIST = "str_list"
    DICT = "dict"

    def __init__(self, kind, default=None, required=False, minimum=None, maximum=None,
                 choices=None):
        """
        Initialize a schema field.

        Args:
            kind: One of the type constants above
            default: Value used when the key is absent
            required: Whether the key must be present
            minimum: Inclusive lower bound for numbers (and list entries)
            maximum: Inclusive upper bound for numbers (and list entries)
            choices: Allowed values for strings
        """
        self.kind = kind
        self.default = default
        self.required = required
        self.minimum = minimum
        self.maximum = maximum
        self.choices = choices

    def _check_range(self, name, number):
        if self.minimum is not None and number < self.minimum:
            raise SchemaError(f"'{name}' must be >= {self.minimum}, got {number}")
        if self.maximum is not None and number > self.maximum:
            raise SchemaError(f"'{name}' must be <= {self.maximum}, got {number}")

    def coerce(self, name, value):
        """
        Validate one value against this field.

        Args:
            name: Key name, for error messages
            value: Raw JSON value

        Returns:
            The validated value
        """
        if self.kind == Field.INT:
            number = validate_int(value)
            if number is None:
                raise SchemaError(f"'{name}' must be an integer, got {value!r}")
            self._check_range(name, number)
            return number

        if self.kind == Field.FLOAT:
            number = validate_float(value)
            if number is None:
                raise SchemaError(f"'{name}' must be a finite number, got {value!r}")
            self._check_range(name, number)
            return number

        if self.kind == Field.BOOL:
            if not isinstance(value, bool):
                raise SchemaError(f"'{name}' must be true or false, got {value!r}")
            return value

        if self.kind == Field.STR:
            if not isinstance(value, str):
                raise SchemaError(f"'{name}' must be a string, got {value!r}")
            if self.choices is not None and value not in self.choices:
                raise SchemaError(f"'{name}' must be one of {sorted(self.choices)}, got {value!r}")
            return value

        if self.kind == Field.DICT:
            if not isinstance(value, dict):
                raise SchemaError(f"'{name}' must be an object")
            return value

        if self.kind in (Field.FLOAT_LIST, Field.INT_LIST, Field.STR_LIST):
            if not isinstance(value, list) or not value:
                raise SchemaError(f"'{name}' must be a non-empty list")
            item_kind = {Field.FLOAT_LIST: Field.FLOAT, Field.INT_LIST: Field.INT,
                         Field.STR_LIST: Field.STR}[self.kind]
            item = Field(item_kind, minimum=self.minimum, maximum=self.maximum,
                         choices=self.choices)
            return [item.coerce(f"{name}[{i}]", entry) for i, entry in enumerate(value)]

        raise SchemaError(f"Unknown field type for '{name}'")


def validate_schema(parameters, schema, context):
    """
    Validate a parameter mapping against a schema.

    Unknown keys are rejected; absent optional keys receive their defaults.

    Args:
        parameters: Mapping from the config file
        schema: Mapping of key name to Field
        context: Name used in error messages (usually the experiment kind)

    Returns:
        New dictionary with validated values
    """
    if not isinstance(parameters, dict):
        raise SchemaError(f"{context}: parameters must be an object")

    unknown = sorted(set(parameters) - set(schema))
    if unknown:
        raise SchemaError(f"{context}: unknown parameter(s) {unknown}")

    validated = {}
    for name, field in schema.items():
        if name in parameters:
            validated[name] = field.coerce(name, parameters[name])
        elif field.required:
            raise SchemaError(f"{context}: missing required parameter '{name}'")
        else:
            validated[name] = field.default
    return validated


def validate_pauli_label(label, name="pauli"):
    """
    Validate a Pauli label such as "ZZI".

    Args:
        label: Label string
        name: Key name for error messages

    Returns:
        Upper-case label
    """
    if not isinstance(label, str) or not label:
        raise SchemaError(f"'{name}' must be a non-empty Pauli label")
    label = label.upper()
    if set(label) - set("IXYZ"):
        raise SchemaError(f"'{name}' may only contain I, X, Y, Z, got {label!r}")
    return label
