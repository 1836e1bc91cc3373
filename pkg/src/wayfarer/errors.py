"""Exception taxonomy shared across the package."""


class WayfarerError(Exception):
    """Base class for all package errors."""


class SceneSchemaError(WayfarerError):
    """Scene document is structurally malformed.

    ``field`` carries a dotted/indexed path to the offending entry,
    e.g. ``objects[2].footprint``.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SceneValidationError(WayfarerError):
    """Scene document parsed but violates a geometric invariant."""

    def __init__(self, object_id, message):
        self.object_id = object_id
        super().__init__(f"{object_id}: {message}")


class ActionParseError(WayfarerError):
    """Decision text did not match the action grammar."""


class BackendError(WayfarerError):
    """Completion provider failed hard (transport, HTTP status, bad config)."""

    def __init__(self, message, attempts=1):
        self.attempts = attempts
        super().__init__(message)


class StageError(WayfarerError):
    """A chain-of-thought stage failed; names the stage that did."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


class ConfigError(WayfarerError):
    """Run/matrix configuration is unusable."""


class TraceError(WayfarerError):
    """Trace file unreadable; carries the 1-based offending line number."""

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")
