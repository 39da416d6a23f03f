class StabcapError(ValueError):
    """Invalid input to one of the stabcap routines."""


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured size limit."""
