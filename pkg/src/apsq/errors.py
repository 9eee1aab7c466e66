class InvalidArgument(ValueError):
    """An argument is outside the domain of the operation."""


class RegimeMismatch(ValueError):
    """The hypotheses required by a bound or theorem do not hold.

    ``violated`` names the inequality that failed, in plain text.
    """

    def __init__(self, violated: str):
        super().__init__(f"hypothesis not satisfied: {violated}")
        self.violated = violated


class SpecError(ValueError):
    """Malformed sweep grid file; ``path`` locates the bad field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
