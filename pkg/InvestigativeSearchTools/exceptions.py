"""
Exceptions raised by the graph model, the loaders and the matching pipeline. Anything that rejects user input is also
a ValueError.
"""


class InvSimError(Exception):
    """Base class for every error raised by this package."""


class GraphBuildError(InvSimError, ValueError):
    """Node/edge records do not form a valid graph (dangling endpoint, conflicting labels, empty ids)."""


class GraphFormatError(InvSimError, ValueError):
    """
    A graph or report file could not be read.

    Parameters
    ----------
    message: str
        What went wrong.
    path: str
        The offending file, if known.
    line: int
        1-based line number, if known.
    """

    def __init__(self, message, path=None, line=None):
        self.message = message
        self.path = path
        self.line = line
        super(GraphFormatError, self).__init__(self._render())

    def _render(self):
        where = ''
        if self.path is not None:
            where = str(self.path)
            if self.line is not None:
                where += ':%d' % self.line
            where += ': '
        return where + self.message


class QueryFormatError(GraphFormatError):
    """The JSON query document is malformed or uses an unknown category."""


class QueryValidationError(InvSimError, ValueError):
    """A query failed validate_query. The report is kept on .report."""

    def __init__(self, report):
        self.report = report
        super(QueryValidationError, self).__init__('invalid query: ' + '; '.join(report.violations))


class PreconditionError(InvSimError, ValueError):
    """An operation was called with arguments violating its precondition."""


class OracleGuardError(InvSimError, ValueError):
    """A brute force oracle was asked to run on an instance larger than its guard rail."""


class ConfigError(InvSimError, ValueError):
    """Bad run configuration (command line usage)."""


class GeneratorSpecError(InvSimError, ValueError):
    """A GenSpec document is invalid."""


class InvariantViolation(InvSimError, AssertionError):
    """An internal cross-check failed, e.g. the engine and the oracle disagree."""
