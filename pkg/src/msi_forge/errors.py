"""Exception types shared across the package."""


class MsiForgeError(Exception):
    """Base class for all package-specific errors."""


class GeometryDomainError(MsiForgeError, ValueError):
    """Input lies outside the mathematical domain of a projection."""


class HeadboxError(MsiForgeError, ValueError):
    """Camera pose leaves the region enclosed by the innermost sphere."""

    def __init__(self, origin_norm: float, inner_radius: float):
        self.origin_norm = float(origin_norm)
        self.inner_radius = float(inner_radius)
        super().__init__(
            f"ray origin at {self.origin_norm:.4f} m violates the headbox of the "
            f"innermost sphere (radius {self.inner_radius:.4f} m)"
        )


class ImageIOError(MsiForgeError, OSError):
    """Reading or writing an image/container file failed."""


class NumericalError(MsiForgeError, ArithmeticError):
    """Optimization produced a non-finite value."""
