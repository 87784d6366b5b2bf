"""Exception types shared across the package."""


class PowerOrbitsError(Exception):
    pass


class ZeroInput(PowerOrbitsError, ValueError):
    pass


class DegreeTooSmall(PowerOrbitsError, ValueError):
    pass


class InvalidParameters(PowerOrbitsError, ValueError):
    pass


class ZeroAlpha(PowerOrbitsError, ValueError):
    pass


class InvalidTriple(PowerOrbitsError, ValueError):
    pass


class WrongHitKind(PowerOrbitsError, ValueError):
    pass


class BitsizeExceeded(PowerOrbitsError, ArithmeticError):
    """An orbit value outgrew the configured bit budget."""

    def __init__(self, bits, budget, step=None):
        self.bits = bits
        self.budget = budget
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"orbit value needs {bits} bits{where}, budget is {budget}")
