"""Exception hierarchy shared by all hdkit modules.

The CLI maps these onto exit codes: ParseError -> 2, PreconditionError -> 3,
ResourceLimitError -> 4. InternalError signals a violated invariant that the
library itself promised to maintain; it is never caught by the CLI.
"""


class HdkitError(Exception):
    """Base class for all errors raised by hdkit."""


class ParseError(HdkitError):
    """Malformed input document (native JSON, HOA text, or lasso text)."""


class PreconditionError(HdkitError):
    """An operation was called on an object outside its stated domain."""


class ResourceLimitError(HdkitError):
    """A construction exceeded an explicit size guard."""


class InternalError(HdkitError):
    """A verified-by-construction invariant failed; indicates a bug."""
