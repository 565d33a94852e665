"""Core dynamics algorithms on a :class:`~invdynopt.model.KinematicTree`.

External contact forces are 3-D point forces expressed in world coordinates,
applied at named frames, passed as an ordered ``{frame_name: force}`` mapping.
"""

from __future__ import annotations

import numpy as np

from . import _dyn
from .model import KinematicTree


class SingularDynamicsError(RuntimeError):
    """Articulated-body inertia became singular (non-physical model)."""


def _contact_arrays(tree: KinematicTree, contacts):
    """Flatten a {frame: force} mapping into kernel arrays."""
    if not contacts:
        return (np.zeros(0, dtype=np.int64), np.zeros((0, 3)), np.zeros((0, 3)))
    links = np.empty(len(contacts), dtype=np.int64)
    offs = np.empty((len(contacts), 3))
    forces = np.empty((len(contacts), 3))
    for k, (name, force) in enumerate(contacts.items()):
        link, offset = tree.frame(name)
        links[k] = link
        offs[k] = offset.translation
        forces[k] = np.asarray(force, dtype=float).reshape(3)
    return links, offs, forces


def contact_frame_arrays(tree: KinematicTree, frame_names):
    """Kernel arrays (link indices, point offsets) for an ordered frame list."""
    links = np.empty(len(frame_names), dtype=np.int64)
    offs = np.empty((len(frame_names), 3))
    for k, name in enumerate(frame_names):
        link, offset = tree.frame(name)
        links[k] = link
        offs[k] = offset.translation
    return links, offs


def rnea(tree: KinematicTree, q, v, a, contacts=None) -> np.ndarray:
    """Inverse dynamics: torques that realize acceleration ``a`` at (q, v)
    under the given contact forces."""
    q = tree.check_vector(q, "q")
    v = tree.check_vector(v, "v")
    a = tree.check_vector(a, "a")
    links, offs, forces = _contact_arrays(tree, contacts)
    return _dyn._rnea(*tree.arrays(), q, v, a, links, offs, forces)


def aba(tree: KinematicTree, q, v, u, contacts=None) -> np.ndarray:
    """Forward dynamics: accelerations produced by torques ``u`` at (q, v)."""
    q = tree.check_vector(q, "q")
    v = tree.check_vector(v, "v")
    u = tree.check_vector(u, "u")
    links, offs, forces = _contact_arrays(tree, contacts)
    qdd, ok = _dyn._aba(*tree.arrays(), q, v, u, links, offs, forces)
    if not ok:
        raise SingularDynamicsError(
            "singular articulated-body inertia; the model has a degree of "
            "freedom with no inertia behind it")
    return qdd


def crba(tree: KinematicTree, q) -> np.ndarray:
    """Joint-space inertia matrix M(q), symmetric positive definite."""
    q = tree.check_vector(q, "q")
    parent, jtype, axis, Et, pt, inertia, _ = tree.arrays()
    return _dyn._crba(parent, jtype, axis, Et, pt, inertia, q)


def frame_kinematics(tree: KinematicTree, q, v, a, frame: str):
    """World-frame position, velocity, classical acceleration and 3 x nv
    translational Jacobian of a frame origin."""
    q = tree.check_vector(q, "q")
    v = tree.check_vector(v, "v")
    a = tree.check_vector(a, "a")
    link, offset = tree.frame(frame)
    parent, jtype, axis, Et, pt, _, _ = tree.arrays()
    return _dyn._point_kinematics(
        parent, jtype, axis, Et, pt, q, v, a, link, offset.translation)


def gravity_compensation(tree: KinematicTree, q) -> np.ndarray:
    """Torques holding the model stationary at ``q`` (rnea with v = a = 0)."""
    n = tree.nv
    return rnea(tree, q, np.zeros(n), np.zeros(n))
