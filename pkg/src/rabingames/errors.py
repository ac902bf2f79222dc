"""Exception types shared across the package."""


class GameFormatError(ValueError):
    """Raised when a game or strategy file cannot be parsed."""


class InvalidGameError(ValueError):
    """Raised when an operation requires a valid game and validation fails."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("invalid game: " + "; ".join(self.violations))


class InvalidStrategyError(ValueError):
    """Raised when a strategy is not valid for the game it is used with."""


class NotClosedError(ValueError):
    """Raised when a state set does not induce a subgame."""


class RegionEmptyError(RuntimeError):
    """Raised when the almost-sure winning region is empty but required."""


class PreconditionViolatedError(RuntimeError):
    """Raised when synthesis is asked to start outside the almost-sure region."""


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive search would exceed its configured budget."""
