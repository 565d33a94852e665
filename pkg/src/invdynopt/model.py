"""Kinematic-tree robot model.

A :class:`KinematicTree` is built from an ordered list of links, each carrying
a :class:`SpatialInertia` and the :class:`Joint` that connects it to its
parent.  Fixed joints are eliminated at construction time (their inertia is
folded into the nearest movable ancestor), so the compiled model seen by the
dynamics kernels contains one degree of freedom per link.

Configuration spaces are Euclidean R^nv throughout; :func:`config_diff` is the
subtraction operation and its Jacobians are +/- identity.  This is the single
extension point for a future manifold-valued configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spatial import SpatialTransform, spatial_inertia_matrix

REVOLUTE = 0
PRISMATIC = 1

_JOINT_KINDS = ("revolute", "prismatic", "fixed")


class ModelError(ValueError):
    """Invalid robot model description."""


@dataclass(frozen=True)
class SpatialInertia:
    """Mass, centre of mass and rotational inertia of one link.

    The 3x3 ``inertia`` is taken about the link-frame origin and expressed in
    link coordinates.
    """

    mass: float
    com: np.ndarray = field(default_factory=lambda: np.zeros(3))
    inertia: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "com", np.asarray(self.com, dtype=float).reshape(3))
        I = np.asarray(self.inertia, dtype=float).reshape(3, 3)
        if self.mass < 0.0 or not np.isfinite(self.mass):
            raise ModelError(f"link mass must be finite and >= 0, got {self.mass}")
        if np.max(np.abs(I - I.T)) > 1e-9:
            raise ModelError("rotational inertia must be symmetric")
        I = 0.5 * (I + I.T)
        if np.linalg.eigvalsh(I).min() < -1e-9:
            raise ModelError("rotational inertia must be positive semidefinite")
        object.__setattr__(self, "inertia", I)

    @staticmethod
    def point_mass(mass: float, at) -> "SpatialInertia":
        """Inertia of a point mass at position ``at`` in the link frame."""
        c = np.asarray(at, dtype=float).reshape(3)
        I = mass * ((c @ c) * np.eye(3) - np.outer(c, c))
        return SpatialInertia(mass, c, I)

    def matrix(self) -> np.ndarray:
        return spatial_inertia_matrix(self.mass, self.com, self.inertia)


@dataclass(frozen=True)
class Joint:
    """Connection of a link to its parent.

    ``frame_offset`` places the joint frame in the parent link frame; the
    joint motion then rotates (or translates) the link about ``axis``
    expressed in the joint frame.
    """

    kind: str
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    parent_link: int = -1
    frame_offset: SpatialTransform = field(default_factory=SpatialTransform.identity)

    def __post_init__(self):
        if self.kind not in _JOINT_KINDS:
            raise ModelError(f"unknown joint kind {self.kind!r}, expected one of {_JOINT_KINDS}")
        ax = np.asarray(self.axis, dtype=float).reshape(3)
        if self.kind != "fixed":
            n = np.linalg.norm(ax)
            if abs(n - 1.0) > 1e-9:
                raise ModelError(f"joint axis must be a unit vector, got norm {n}")
        object.__setattr__(self, "axis", ax)


class KinematicTree:
    """Immutable rigid-body tree with named operational frames.

    Parameters
    ----------
    links:
        Ordered ``(SpatialInertia, Joint)`` pairs in topological order
        (``joint.parent_link`` < own index; -1 attaches to the world).
    gravity:
        World-frame gravitational acceleration, default ``(0, 0, -9.81)``.
    frames:
        Mapping ``name -> (link_index, SpatialTransform)``.  A frame named
        after each link is added automatically when ``link_names`` is given.
    link_names:
        Optional names, used for frames and URDF round trips.
    """

    def __init__(self, links, gravity=(0.0, 0.0, -9.81), frames=None, link_names=None):
        links = list(links)
        if link_names is None:
            link_names = [f"link{i}" for i in range(len(links))]
        if len(link_names) != len(links):
            raise ModelError("link_names must match links")
        for i, (inertia, joint) in enumerate(links):
            if not isinstance(inertia, SpatialInertia) or not isinstance(joint, Joint):
                raise ModelError("links must be (SpatialInertia, Joint) pairs")
            if not -1 <= joint.parent_link < i:
                raise ModelError(
                    f"link {i} ({link_names[i]!r}): parent index {joint.parent_link} must "
                    f"precede it (tree in topological order)"
                )

        self.gravity = np.asarray(gravity, dtype=float).reshape(3)

        # Fold fixed joints into their nearest movable ancestor.  pose[i] is
        # the pose of input link i in its movable ancestor's frame (identity
        # for movable links); target[i] the ancestor's compiled index.
        target = [-1] * len(links)
        pose = [SpatialTransform.identity()] * len(links)
        movable: list[tuple[SpatialInertia, Joint]] = []
        movable_names: list[str] = []
        compiled_index = {}
        inertia_acc: list[np.ndarray] = []

        for i, (inertia, joint) in enumerate(links):
            if joint.kind == "fixed":
                p = joint.parent_link
                if p == -1:
                    target[i] = -1
                    pose[i] = joint.frame_offset
                else:
                    target[i] = target[p]
                    pose[i] = pose[p].compose(joint.frame_offset)
                # Mass welded to the world is carried by the ground and
                # cannot influence the dynamics; drop it.
                if target[i] >= 0:
                    X = _motion_transform_np(pose[i])
                    inertia_acc[target[i]] += X.T @ inertia.matrix() @ X
            else:
                p = joint.parent_link
                if p == -1:
                    new_parent, off = -1, joint.frame_offset
                else:
                    new_parent = target[p]
                    off = pose[p].compose(joint.frame_offset)
                j = Joint(joint.kind, joint.axis, new_parent, off)
                target[i] = len(movable)
                compiled_index[i] = len(movable)
                movable.append((inertia, j))
                movable_names.append(link_names[i])
                inertia_acc.append(inertia.matrix())

        self.links = tuple(movable)
        self.link_names = tuple(movable_names)
        self.nv = len(movable)
        self.nq = self.nv

        # Compiled arrays for the numba kernels.
        nb = self.nv
        self._parent = np.empty(nb, dtype=np.int64)
        self._jtype = np.empty(nb, dtype=np.int64)
        self._axis = np.empty((nb, 3))
        self._Et = np.empty((nb, 3, 3))
        self._pt = np.empty((nb, 3))
        self._inertia = np.empty((nb, 6, 6))
        for k, (inertia, joint) in enumerate(movable):
            self._parent[k] = joint.parent_link
            self._jtype[k] = REVOLUTE if joint.kind == "revolute" else PRISMATIC
            self._axis[k] = joint.axis
            self._Et[k] = joint.frame_offset.rotation.T
            self._pt[k] = joint.frame_offset.translation
            self._inertia[k] = inertia_acc[k]

        # Operational frames: name -> (compiled link index or -1, offset).
        self.frames: dict[str, tuple[int, SpatialTransform]] = {}
        for i, name in enumerate(link_names):
            li = target[i] if links[i][1].kind == "fixed" else compiled_index[i]
            self.frames[name] = (li, pose[i] if links[i][1].kind == "fixed" else SpatialTransform.identity())
        if frames:
            for name, (link_index, offset) in frames.items():
                if not -1 <= link_index < len(links):
                    raise ModelError(f"frame {name!r} attached to unknown link {link_index}")
                if link_index == -1:
                    self.frames[name] = (-1, offset)
                else:
                    li = target[link_index] if links[link_index][1].kind == "fixed" else compiled_index[link_index]
                    base = pose[link_index] if links[link_index][1].kind == "fixed" else SpatialTransform.identity()
                    self.frames[name] = (li, base.compose(offset))

    # -- lookups -----------------------------------------------------------

    def frame(self, name: str) -> tuple[int, SpatialTransform]:
        try:
            return self.frames[name]
        except KeyError:
            raise ModelError(f"unknown frame {name!r}; defined frames: {sorted(self.frames)}") from None

    def arrays(self):
        """Compiled model arrays consumed by the dynamics kernels."""
        return (self._parent, self._jtype, self._axis, self._Et, self._pt,
                self._inertia, self.gravity)

    def check_vector(self, x, name: str) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.nv:
            raise ValueError(f"{name} has dimension {x.shape[0]}, model expects {self.nv}")
        return x


def _motion_transform_np(T: SpatialTransform) -> np.ndarray:
    """Motion transform into the child frame described by pose ``T``."""
    E = T.rotation.T
    r = T.translation
    X = np.zeros((6, 6))
    X[:3, :3] = E
    X[3:, 3:] = E
    rx = np.array([[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]])
    X[3:, :3] = -E @ rx
    return X


def config_diff(q1, q2):
    """Subtraction of configurations: ``q1 - q2`` on the Euclidean space."""
    q1 = np.asarray(q1, dtype=float).reshape(-1)
    q2 = np.asarray(q2, dtype=float).reshape(-1)
    if q1.shape != q2.shape:
        raise ValueError(f"configuration dimensions differ: {q1.shape[0]} vs {q2.shape[0]}")
    return q1 - q2


def config_diff_jacobians(q1, q2):
    """Jacobians of :func:`config_diff` with respect to its two arguments."""
    q1 = np.asarray(q1, dtype=float).reshape(-1)
    q2 = np.asarray(q2, dtype=float).reshape(-1)
    if q1.shape != q2.shape:
        raise ValueError(f"configuration dimensions differ: {q1.shape[0]} vs {q2.shape[0]}")
    n = q1.shape[0]
    return np.eye(n), -np.eye(n)
