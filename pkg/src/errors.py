"""Error classes.

Notes:
    Every error is a RuntimeError so callers can keep catching RuntimeError.
    main.run() maps InputError to exit code 2 and ConvergenceError to exit code 3.
"""


class QndError(RuntimeError):
    """Base class for toolkit errors."""


class InputError(QndError):
    """Invalid input, config, or file content."""


class PoleError(InputError):
    """Evaluation inside the pole-guard band of a resonance."""


class ConvergenceError(QndError):
    """A numerical routine did not converge."""
