"""msi_forge: multi-sphere image fitting and 6DoF view synthesis from ODS panoramas."""

from .errors import (
    GeometryDomainError,
    HeadboxError,
    ImageIOError,
    MsiForgeError,
    NumericalError,
)
from .geometry import Pose, ViewingCircle
from .imaging import ErpImage
from .msi import Msi, Projection
from .sweep import SphereSweepVolume

__all__ = [
    "ErpImage",
    "GeometryDomainError",
    "HeadboxError",
    "ImageIOError",
    "Msi",
    "MsiForgeError",
    "NumericalError",
    "Pose",
    "Projection",
    "SphereSweepVolume",
    "ViewingCircle",
]

__version__ = "0.1.0"
