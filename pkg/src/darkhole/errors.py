"""Error type shared by all modules.

Every failure carries a short machine-readable ``code`` (``NEGATIVE_RATE``,
``UNKNOWN_PRESET``, ``STEP_UNDERFLOW``, ...) so that the command line front end
can report it and tests can match on it.
"""


class DarkholeError(ValueError):
    def __init__(self, code, message=""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class NotConvergedError(DarkholeError):
    """Raised when a windowed average still drifts.

    The partially converged averages are kept on ``result`` so callers that
    only want to flag the point (spectrum scans) can still use them.
    """

    def __init__(self, message, result=None):
        super().__init__("NOT_CONVERGED", message)
        self.result = result
