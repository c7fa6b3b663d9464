"""Exception hierarchy shared by every pvdb layer.

Each error class carries the process exit code the CLI reports for it:
1 for bad user input, 2 when a fingerprint fails to reproduce, 3 for
integrity and internal failures.
"""

from __future__ import annotations


class PvdbError(Exception):
    """Base class for all errors raised by pvdb."""

    exit_code: int = 3


class UserError(PvdbError):
    """Bad input: malformed files, invalid queries, impossible requests."""

    exit_code = 1


class ReproductionError(PvdbError):
    """A fingerprint did not reproduce its recorded dataset."""

    exit_code = 2


class IntegrityError(PvdbError):
    """The archive contradicts its own content addressing or closure."""

    exit_code = 3


# --------------------------------------------------------------------------------------------------
# Archive model
# --------------------------------------------------------------------------------------------------


class InvalidNodeError(IntegrityError):
    """A node record violates its type invariants (unsorted or duplicate names, bad fields)."""


class IntegrityConflictError(IntegrityError):
    """Two different node records claim the same Swhid."""

    def __init__(self, swhid: object, detail: str = "") -> None:
        self.swhid = swhid
        message = f"conflicting records for {swhid}"
        super().__init__(f"{message}: {detail}" if detail else message)


class HashMismatchError(IntegrityError):
    """A node's stored id differs from the hash of its manifest."""

    def __init__(self, swhid: object, computed: object) -> None:
        self.swhid = swhid
        self.computed = computed
        super().__init__(f"{swhid} does not match its content (recomputed {computed})")


class DanglingReferenceError(IntegrityError):
    """A reference does not resolve in the node store."""

    def __init__(self, swhid: object, referrer: object) -> None:
        self.swhid = swhid
        self.referrer = referrer
        super().__init__(f"{referrer} references missing node {swhid}")


class AppendOnlyViolationError(UserError):
    """A merge would rewrite the visit history of an origin."""

    def __init__(self, url: str, detail: str) -> None:
        self.url = url
        super().__init__(f"append-only violation on origin {url}: {detail}")


# --------------------------------------------------------------------------------------------------
# Store
# --------------------------------------------------------------------------------------------------


class ExchangeFormatError(UserError):
    """A line of an exchange or list file could not be parsed."""

    def __init__(self, path: object, line: int, detail: str) -> None:
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {detail}")


class UnsupportedFormatError(UserError):
    """An exchange file declares a format version this build does not read."""


class StoreIOError(UserError):
    """Reading or writing a file failed."""

    def __init__(self, path: object, cause: BaseException) -> None:
        self.path = path
        super().__init__(f"{path}: {cause}")


class InvalidParamsError(UserError):
    """Simulation parameters or command arguments are out of range."""


# --------------------------------------------------------------------------------------------------
# Query frontend
# --------------------------------------------------------------------------------------------------


class FpqlSyntaxError(UserError):
    """The query text does not match the grammar."""

    def __init__(self, line: int, column: int, found: str, expected: frozenset[str]) -> None:
        self.line = line
        self.column = column
        self.found = found
        self.expected = expected
        wanted = ", ".join(sorted(expected)) if expected else "nothing"
        super().__init__(f"{line}:{column}: syntax error at {found}; expected one of: {wanted}")


class FpqlTypeError(UserError):
    """The query is syntactically valid but ill-typed against the metamodel."""

    def __init__(self, line: int, column: int, detail: str) -> None:
        self.line = line
        self.column = column
        self.detail = detail
        super().__init__(f"{line}:{column}: {detail}")


# --------------------------------------------------------------------------------------------------
# Engine
# --------------------------------------------------------------------------------------------------


class TimestampAheadError(UserError):
    """A fingerprint is newer than the archive it is run on."""

    def __init__(self, fingerprint_timestamp: str, export_timestamp: str) -> None:
        super().__init__(
            f"fingerprint timestamp {fingerprint_timestamp} is after the archive export "
            f"timestamp {export_timestamp}; an export cannot know later visits"
        )


class DatasetHashMismatchError(ReproductionError):
    """The selected dataset hashes differently from the recorded fingerprint hash."""

    def __init__(self, expected: str, computed: str) -> None:
        self.expected = expected
        self.computed = computed
        super().__init__(f"dataset hash mismatch: expected {expected}, computed {computed}")


class EvaluationError(UserError):
    """A query failed while being evaluated."""


class BudgetExceededError(EvaluationError):
    """Evaluation ran out of its depth, node-visit or wall-clock budget."""

    def __init__(self, resource: str, limit: object, origin: str | None) -> None:
        self.resource = resource
        self.origin = origin
        where = f" while evaluating origin {origin}" if origin else ""
        super().__init__(f"{resource} budget of {limit} exhausted{where}")


class NullComparisonError(EvaluationError):
    """Null reached an operator that does not accept it."""

    def __init__(self, line: int, column: int, detail: str) -> None:
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {detail}")


class ClosureCycleError(IntegrityError):
    """A parent or release chain loops, which content addressing forbids."""


# --------------------------------------------------------------------------------------------------
# Dataset extraction
# --------------------------------------------------------------------------------------------------


class StaleListError(UserError):
    """An origin list does not match the archive it is applied to."""
