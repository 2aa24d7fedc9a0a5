"""Exception hierarchy shared by all modules."""


class LadderError(Exception):
    """Base class for every domain error raised by :mod:`lcladder`."""


class CutError(LadderError, ValueError):
    """``t`` lies on the branch cut ``(-inf, -1/4]`` of ``sqrt(1 + 4t)``.

    Lossless passband inputs land here; add small series/shunt losses
    (``r, r' > 0``) and take the limit afterwards.
    """


class PoleError(LadderError, ZeroDivisionError):
    """An iterate landed on the pole ``p = -t`` of the ladder map."""

    def __init__(self, index, value):
        super().__init__(f"iterate {index} hit the pole of the ladder map (p = {value!r})")
        self.index = index
        self.value = value


class DegenerateError(LadderError, ValueError):
    """Zero series or shunt impedance; the ladder recursion is undefined."""


class InfinityError(LadderError, ZeroDivisionError):
    """The Moebius coordinate of the repelling fixed point is infinite."""


class NoConvergence(LadderError, RuntimeError):
    """Iteration budget exhausted, or the input is (near-)marginal."""


class UnstableSeed(LadderError, ValueError):
    """Seed equals the repelling fixed point ``p_-``."""


class FitError(LadderError, RuntimeError):
    """Loss-sequence extrapolation saw non-monotone residuals."""


class UnwrapError(LadderError, ValueError):
    """Frequency grid too coarse to unwrap the transfer phase."""


class BandwidthError(LadderError, ValueError):
    """Packet spectrum leaks out of the passband."""

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage


class SearchFailure(LadderError, RuntimeError):
    """No contracting disc around the attractor could be found."""
