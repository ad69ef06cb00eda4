"""Exception hierarchy for hamlab.

Contract errors carry witnesses so that failures are self-explanatory:
an algorithm that was promised a precondition and finds it false reports
the violating object rather than a bare message.
"""


class HamlabError(Exception):
    """Base class for all hamlab errors."""


class ParameterError(HamlabError):
    """A parameter is outside its documented range."""


class PreconditionError(HamlabError):
    """A documented precondition is checkably false."""


class MalformedCertificateError(HamlabError):
    """A certificate has the wrong shape (e.g. wrong length)."""


class ContractError(HamlabError):
    """An asserted property of the input turned out to be false.

    ``witness`` holds the violating object (a vertex set, a pair name, ...).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnreachableError(HamlabError):
    """No walk/path exists between the requested endpoints."""


class WrongPipelineError(HamlabError):
    """The instance belongs to the other pipeline (connectivity dichotomy)."""

    def __init__(self, message, separator=None):
        super().__init__(message)
        self.separator = separator


class SearchFailureError(HamlabError):
    """A heuristic search gave up; distinct from proven nonexistence."""


class GenerationError(HamlabError):
    """A randomized generator exhausted its retry budget."""


class ScaleError(HamlabError):
    """The instance is too large for an exact/exhaustive routine."""
