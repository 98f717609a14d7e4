"""Exception hierarchy and machine-parsable warning codes.

Every error class carries the process exit status the CLI maps it to.
Warnings go to the ``triaffect`` logger on stderr so scripted callers can
grep for the ``W###`` codes.
"""

import logging

log = logging.getLogger("triaffect")


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InputError(ToolkitError):
    """Bad input: malformed values, missing files, unknown names."""

    exit_code = 2


class SchemaError(InputError):
    """A file or value parses but violates its declared schema."""


class IntegrityError(InputError):
    """A bundled resource fails one of its documented invariants."""


class ParseError(InputError):
    """A filename does not parse under the active convention."""


class ProtocolError(InputError):
    """An annotation payload is malformed or inconsistent with its request."""


class JoinError(ToolkitError):
    """A channel file references a segment id that is not in the table."""

    exit_code = 3


class TransportError(ToolkitError):
    """A live annotation endpoint failed after all retries."""

    exit_code = 4


class DegenerateStatisticsError(ToolkitError):
    """A statistic is undefined for the data (constant series, n too small)."""

    exit_code = 5


# Warning codes (stderr, machine-parsable).
W_FILTERED_ROWS = "W001"
W_UNMATCHED_LABEL = "W002"
W_DEGRADED_ANNOTATION = "W003"
W_EMPTY_CHANNEL = "W004"
W_COMPARISON_UNAVAILABLE = "W005"


def warn(code: str, message: str) -> None:
    log.warning("%s %s", code, message)
