"""Error types shared across the package.

The CLI maps these onto exit codes: InputError -> 2, ResourceLimitError -> 3.
InternalError signals a broken invariant (e.g. the order-computation cap was
hit, which a correct build never does) and is not converted to a clean exit.
"""


class GrigError(Exception):
    pass


class InputError(GrigError):
    """Malformed user input: bad letters, bad vertex strings, bad tables."""


class ResourceLimitError(GrigError):
    """A configured guard (quotient depth, tower level, closure size) was hit."""


class InternalError(GrigError):
    """An invariant the implementation relies on failed to hold."""
