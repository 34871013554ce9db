class MacroforgeError(Exception):
    """Base class for every error raised by the planner."""


class InputError(MacroforgeError):
    """Malformed or unresolvable input. `path` is a JSON-path style location."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class ResourceError(MacroforgeError):
    pass


class BallSizeExceeded(ResourceError):
    def __init__(self, projected: int, cap: int):
        self.projected = projected
        self.cap = cap
        super().__init__(
            f"Hamming ball of {projected} states exceeds ball_cap={cap} "
            "(raise --ball-cap or use --filter consistent)"
        )


class CombineMisuseError(MacroforgeError):
    """combine() called on a pair of actions that can never run back to back."""


class InvariantViolation(MacroforgeError):
    """An internal invariant broke; always a bug, never bad input."""
