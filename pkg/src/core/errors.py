"""
Thue2DLite error types

Expected search outcomes (Unknown verdicts, missing witnesses, model
violations) are returned as values. Everything here signals malformed input
or a broken precondition.
"""
from typing import Optional


class Thue2DLiteError(Exception):
    """Base class for all errors raised by the workbench"""


class ThueFormatError(Thue2DLiteError):
    """A .thue document could not be turned into a valid instance"""

    code = "Syntax"

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 symbol: Optional[str] = None):
        self.line = line
        self.column = column
        self.symbol = symbol
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
            location += ": "
        super().__init__(f"{location}{self.code}: {message}")


class UnknownSymbol(ThueFormatError):
    code = "UnknownSymbol"


class EmptyRuleSide(ThueFormatError):
    code = "EmptyRuleSide"


class MissingGoal(ThueFormatError):
    code = "MissingGoal"


class DuplicateAlphabetSymbol(ThueFormatError):
    code = "DuplicateAlphabetSymbol"


class ReservedSymbol(ThueFormatError):
    code = "ReservedSymbol"


class TextFormatError(Thue2DLiteError):
    """Malformed .struct / .cq / .onto document"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class MissingConstant(Thue2DLiteError):
    """A structure does not interpret a constant the check needs"""

    def __init__(self, constant: str):
        self.constant = constant
        super().__init__(f"constant '{constant}' is not interpreted")


class MissingConstantInterpretation(MissingConstant):
    """A structure does not interpret a constant declared by an ontology"""


class DuplicateConstant(Thue2DLiteError):
    def __init__(self, constant: str):
        self.constant = constant
        super().__init__(f"constant '{constant}' occurs in more than one part")


class NotClosedAtBound(Thue2DLiteError):
    """The bounded congruence closure does not yield a closed finite quotient"""

    def __init__(self, max_len: int, reason: str = ""):
        self.max_len = max_len
        self.reason = reason
        detail = f" ({reason})" if reason else ""
        super().__init__(f"finite quotient not certified at max_len={max_len}{detail}")


class CeilingExceeded(Thue2DLiteError):
    def __init__(self, requested: int, ceiling: int):
        self.requested = requested
        self.ceiling = ceiling
        super().__init__(f"max_vertices={requested} exceeds the configured ceiling {ceiling}")


class IndexOutOfRange(Thue2DLiteError):
    def __init__(self, index: int, upper: int):
        self.index = index
        self.upper = upper
        super().__init__(f"rule index {index} outside 1..{upper}")


class UnsafeQuery(Thue2DLiteError):
    def __init__(self, variables):
        self.variables = sorted(variables)
        super().__init__(f"variables {', '.join(self.variables)} occur only in inequality or negated literals")


class ConfigError(Thue2DLiteError):
    pass


class UsageError(Thue2DLiteError):
    """Bad command-line usage: unknown variant, check name or flag combination"""
