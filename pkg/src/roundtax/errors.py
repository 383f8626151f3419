"""Exception types; each maps to one CLI exit status."""


class RoundTaxError(Exception):
    exit_code = 1


class DomainError(RoundTaxError, ValueError):
    """An argument outside the operation's domain."""

    exit_code = 2


class DataFormatError(RoundTaxError, ValueError):
    """Malformed or invalid input data; ``row`` is 1-based including the header."""

    exit_code = 2

    def __init__(self, message: str, *, source: str | None = None, row: int | None = None):
        self.source = source
        self.row = row
        where = ""
        if source is not None:
            where = f"{source}:"
        if row is not None:
            where += f"{row}:"
        super().__init__(f"{where} {message}" if where else message)


class InfeasibleScenarioError(RoundTaxError, ValueError):
    exit_code = 3


class InvariantBreach(RoundTaxError, AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""

    exit_code = 4
