"""Geodesic flows on Lie groups: the n-dimensional rigid body, generic
Euler-Arnold equations and H^k geodesics on the diffeomorphism group of the
circle."""

from . import circle_diff, euler_arnold, lie_core, rigid_body
from .errors import GeoflowError

__all__ = ["lie_core", "rigid_body", "euler_arnold", "circle_diff", "GeoflowError"]
__version__ = "0.1.0"
