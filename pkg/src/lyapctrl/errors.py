"""Exception types shared across the package."""

from __future__ import annotations


class LyapctrlError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(LyapctrlError):
    def __init__(self, dim_a: int, dim_b: int, what: str = "operands"):
        super().__init__(f"dimension mismatch between {what}: {dim_a} vs {dim_b}")
        self.dim_a = dim_a
        self.dim_b = dim_b


class HermiticityError(LyapctrlError):
    """Matrix fails the Hermiticity tolerance, or an expectation value that
    should be real came out with a large imaginary part."""


class DomainError(LyapctrlError):
    """Time outside the model's domain, or an otherwise invalid argument."""


class GaugeTrackingError(LyapctrlError):
    """Eigenstate continuity tracking lost between consecutive frames."""

    def __init__(self, t: float, max_overlap: float):
        super().__init__(
            f"gauge tracking lost at t={t:g} (best level overlap {max_overlap:.3f} "
            f"< 0.5); reduce the grid step"
        )
        self.t = t


class DegeneracyError(LyapctrlError):
    """Two eigenvalues too close for a perturbative eigenstate derivative."""

    def __init__(self, t: float, level_a: int, level_b: int, gap: float):
        super().__init__(
            f"levels {level_a} and {level_b} degenerate at t={t:g} "
            f"(gap {gap:.3e} below 1e-8)"
        )
        self.levels = (level_a, level_b)


class ScenarioError(LyapctrlError):
    """Invalid scenario document; carries the JSON path of the offender."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
