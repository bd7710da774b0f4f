"""Exceptions."""

from enum import IntEnum


class ExitStatus(IntEnum):
    """Process exit statuses."""

    OK = 0
    CHECK_FAILED = 1
    USAGE = 2
    NUMERIC = 3


class CustomException(Exception):
    """Custom Exception."""

    def __init__(self, status_code: int, detail: str):
        """Initialize with status code and detail message."""
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail


class ParseException(CustomException):
    """Malformed ingestion record."""

    def __init__(self, detail: str, line_number: int | None = None):
        """Initialize with detail and the offending line number."""
        if line_number is not None:
            detail = f"line {line_number}: {detail}"
        super().__init__(status_code=ExitStatus.USAGE, detail=detail)
        self.line_number = line_number


class GeometryValidationException(CustomException):
    """Geometry invariant violation."""

    def __init__(self, detail: str):
        """Initialize with the violated invariant."""
        super().__init__(status_code=ExitStatus.USAGE, detail=detail)


class ConfigException(CustomException):
    """Bad configuration key, value or file."""

    def __init__(self, detail: str):
        """Initialize with detail message."""
        super().__init__(status_code=ExitStatus.USAGE, detail=detail)


class DataException(CustomException):
    """Unusable input data."""

    def __init__(self, detail: str):
        """Initialize with detail message."""
        super().__init__(status_code=ExitStatus.USAGE, detail=detail)


class ShapeException(CustomException):
    """Tensor shape mismatch."""

    def __init__(self, op: str, *shapes: tuple):
        """Initialize with the op name and the offending shapes."""
        joined = " and ".join(str(tuple(s)) for s in shapes)
        super().__init__(
            status_code=ExitStatus.USAGE, detail=f"{op}: incompatible shapes {joined}"
        )


class NumericException(CustomException):
    """Non-finite values in a computation."""

    def __init__(self, detail: str):
        """Initialize with detail message."""
        super().__init__(status_code=ExitStatus.NUMERIC, detail=detail)


class ProbeException(CustomException):
    """Probe cannot be fitted on the given data."""

    def __init__(self, detail: str):
        """Initialize with detail message."""
        super().__init__(status_code=ExitStatus.USAGE, detail=detail)
