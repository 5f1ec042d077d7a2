"""Exception hierarchy; the CLI maps each class to an exit code."""


class CornerHomError(Exception):
    exit_code = 1


class InputError(CornerHomError, ValueError):
    """Malformed or out-of-hypothesis input."""

    exit_code = 2


class BudgetError(CornerHomError):
    """A truncation or stabilization budget was exhausted."""

    exit_code = 3


class EngineDefect(CornerHomError, AssertionError):
    """An internal consistency check failed (a bug, not bad input)."""

    exit_code = 4
