"""Spatial (6-D) vector algebra in the Featherstone convention.

Spatial motion vectors are stored as ``[angular; linear]`` 6-arrays, spatial
forces as ``[moment; force]``.  Coordinate transforms are represented by a
rotation ``E`` (maps parent coordinates to child coordinates) and the child
origin ``r`` expressed in parent coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit


@njit(cache=True)
def skew(v):
    """3x3 cross-product matrix: skew(v) @ w == cross(v, w)."""
    out = np.zeros((3, 3))
    out[0, 1] = -v[2]
    out[0, 2] = v[1]
    out[1, 0] = v[2]
    out[1, 2] = -v[0]
    out[2, 0] = -v[1]
    out[2, 1] = v[0]
    return out


@njit(cache=True)
def rotation_about(axis, angle):
    """Rotation matrix for ``angle`` radians about a unit ``axis`` (Rodrigues)."""
    c = np.cos(angle)
    s = np.sin(angle)
    k = skew(axis)
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


@njit(cache=True)
def motion_transform(E, r):
    """6x6 motion transform from parent to child coordinates.

    ``E`` maps parent coordinates to child coordinates, ``r`` is the child
    origin expressed in parent coordinates.
    """
    X = np.zeros((6, 6))
    X[:3, :3] = E
    X[3:, 3:] = E
    X[3:, :3] = -E @ skew(r)
    return X


@njit(cache=True)
def motion_cross(v):
    """6x6 operator for the motion-vector cross product ``v x``."""
    out = np.zeros((6, 6))
    wx = skew(v[:3])
    out[:3, :3] = wx
    out[3:, 3:] = wx
    out[3:, :3] = skew(v[3:])
    return out


@njit(cache=True)
def force_cross(v):
    """6x6 operator for the force-vector cross product ``v x*`` (= -crm(v)^T)."""
    out = np.zeros((6, 6))
    wx = skew(v[:3])
    out[:3, :3] = wx
    out[:3, 3:] = skew(v[3:])
    out[3:, 3:] = wx
    return out


@njit(cache=True)
def force_cross_flipped(y):
    """Matrix ``B(y)`` with ``force_cross(x) @ y == B(y) @ x`` for all x."""
    out = np.zeros((6, 6))
    ax = skew(y[:3])
    lx = skew(y[3:])
    out[:3, :3] = -ax
    out[:3, 3:] = -lx
    out[3:, :3] = -lx
    return out


@njit(cache=True)
def spatial_inertia_matrix(mass, com, inertia):
    """6x6 spatial inertia from mass, CoM offset and the 3x3 rotational
    inertia taken about the link-frame origin."""
    out = np.zeros((6, 6))
    cx = skew(com)
    out[:3, :3] = inertia
    out[:3, 3:] = mass * cx
    out[3:, :3] = mass * cx.T
    out[3:, 3:] = mass * np.eye(3)
    return out


def _as_unit3(v, name):
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or abs(n - 1.0) > 1e-9:
        raise ValueError(f"{name} must be a unit 3-vector, got norm {n!r}")
    return v


@dataclass(frozen=True)
class SpatialVector:
    """A 6-D motion or force quantity split into angular and linear parts."""

    angular: np.ndarray
    linear: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angular", np.asarray(self.angular, dtype=float).reshape(3))
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=float).reshape(3))
        if not (np.isfinite(self.angular).all() and np.isfinite(self.linear).all()):
            raise ValueError("spatial vector entries must be finite")

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.angular, self.linear])

    @staticmethod
    def from_array(arr) -> "SpatialVector":
        arr = np.asarray(arr, dtype=float).reshape(6)
        return SpatialVector(arr[:3], arr[3:])

    def cross_motion(self, other: "SpatialVector") -> "SpatialVector":
        """Motion x motion cross product."""
        return SpatialVector.from_array(motion_cross(self.as_array()) @ other.as_array())

    def cross_force(self, other: "SpatialVector") -> "SpatialVector":
        """Motion x* force cross product."""
        return SpatialVector.from_array(force_cross(self.as_array()) @ other.as_array())


@dataclass(frozen=True)
class SpatialTransform:
    """Pose of a child frame in a parent frame.

    ``rotation`` maps child coordinates to parent coordinates, ``translation``
    is the child origin in parent coordinates.
    """

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-12:
            raise ValueError("rotation must be orthonormal (R^T R = I within 1e-12)")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    def compose(self, other: "SpatialTransform") -> "SpatialTransform":
        """Pose of ``other`` (child of self's child) in self's parent frame."""
        return SpatialTransform(
            self.rotation @ other.rotation,
            self.translation + self.rotation @ other.translation,
        )

    def apply(self, point) -> np.ndarray:
        """Map a point from child coordinates to parent coordinates."""
        return self.rotation @ np.asarray(point, dtype=float).reshape(3) + self.translation

    @staticmethod
    def identity() -> "SpatialTransform":
        return SpatialTransform()
