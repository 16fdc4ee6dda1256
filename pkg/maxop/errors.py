# errors.py
"""Exception hierarchy for maxop.

Every leaf also derives from the closest builtin so that callers catching
``ValueError``/``RuntimeError`` keep working.
"""

from __future__ import annotations

from typing import Optional, Tuple


class MaxopError(Exception):
    """Base class for all maxop failures."""


class KernelError(MaxopError, ValueError):
    """Invalid kernel parameters or a failed unit-mass check."""


class QuadratureError(MaxopError, RuntimeError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class CertificationError(MaxopError, RuntimeError):
    """The sup over scales could not be certified within the budget."""

    def __init__(self, x: float, best: float, gap: float, message: str = ""):
        text = message or "maximal function not certified"
        super().__init__(f"{text} at x={x!r}: best={best!r}, gap={gap!r}")
        self.x = x
        self.best = best
        self.gap = gap


class BracketError(MaxopError, RuntimeError):
    """A level-crossing bracket does not satisfy the sign condition."""

    def __init__(self, k: int, bracket: Tuple[float, float], message: str = ""):
        text = message or "no level crossing in bracket"
        super().__init__(f"{text}: k={k}, bracket=({bracket[0]!r}, {bracket[1]!r})")
        self.k = k
        self.bracket = bracket


class InconclusiveTransfer(MaxopError):
    """Level crossing is within numerical margin of the profile error."""

    def __init__(self, k: int, margin: float):
        super().__init__(f"transfer inconclusive at k={k}: margin {margin:.3e}")
        self.k = k
        self.margin = margin


class TailRadiusError(MaxopError, RuntimeError):
    """No admissible tail radius below the budget."""

    def __init__(self, radius: float, residual: Optional[float] = None):
        super().__init__(f"tail radius budget exhausted at R={radius!r} (residual {residual!r})")
        self.radius = radius
        self.residual = residual


class SequenceError(MaxopError, ValueError):
    """A continuity sequence does not converge in W^{1,1}."""


class ConfigError(MaxopError, ValueError):
    """Invalid run configuration; ``field`` names the offending option."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
