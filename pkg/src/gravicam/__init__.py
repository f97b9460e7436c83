"""Gravity-aligned camera trajectory sampling and 360-video reprojection toolkit."""

__version__ = "0.1.0"

from . import bench, geom, metrics, pano, pipeline, plucker, pose, traj  # noqa: F401
