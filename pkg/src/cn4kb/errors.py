"""Exception hierarchy shared by every cn4kb module."""


class CN4Error(Exception):
    """Base class; the CLI maps subclasses to exit codes."""


class UsageError(CN4Error, ValueError):
    """Bad command line or invalid parameter combination."""


class DataError(CN4Error):
    """Problem with the input data (exit code 2)."""


class ParseError(DataError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class SchemaError(ParseError):
    """A row does not have the column arity declared for its table."""


class IntegrityError(DataError):
    """Duplicate IDs, dangling references that must resolve, and similar."""


class FitError(DataError):
    """Power-law fit impossible for the given sample."""


class UndefinedError(DataError):
    """A statistic is undefined for the given input (e.g. no edges)."""
