"""Coherent-state geometry of complex Grassmannians G_n(C^(n+m))."""

from .grassmann import (
    Plane,
    Shape,
    base_point,
    distance,
    exp_map,
    frame_from_z,
    geodesic,
    log_map,
    z_from_plane,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Plane",
    "Shape",
    "base_point",
    "distance",
    "exp_map",
    "frame_from_z",
    "geodesic",
    "log_map",
    "z_from_plane",
]
