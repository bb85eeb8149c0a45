class CokError(Exception):
    """Root of every error raised by cokb."""


class ContractError(CokError, ValueError):
    """A caller broke an operation's precondition."""
