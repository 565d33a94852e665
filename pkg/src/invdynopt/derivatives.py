"""Analytic first-order sensitivities of inverse dynamics and of contact
constraints, plus the central-difference oracle used to validate them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _dyn
from .dynamics import _contact_arrays
from .model import KinematicTree


@dataclass
class IdDerivatives:
    """Jacobians of the inverse-dynamics map at one point.

    ``id_a`` equals the joint-space inertia matrix; ``id_f`` equals minus the
    transposed stack of contact-point Jacobians.
    """

    id_q: np.ndarray
    id_v: np.ndarray
    id_a: np.ndarray
    id_f: np.ndarray


@dataclass
class ConstraintRows:
    """One block of equality-constraint rows and its Jacobians over
    (q, v, a, f, u)."""

    value: np.ndarray
    jac_q: np.ndarray
    jac_v: np.ndarray
    jac_a: np.ndarray
    jac_f: np.ndarray
    jac_u: np.ndarray


def rnea_derivatives(tree: KinematicTree, q, v, a, contacts=None) -> IdDerivatives:
    """Exact Jacobians of :func:`invdynopt.dynamics.rnea` w.r.t. q, v, a, f."""
    q = tree.check_vector(q, "q")
    v = tree.check_vector(v, "v")
    a = tree.check_vector(a, "a")
    links, offs, forces = _contact_arrays(tree, contacts)
    parent, jtype, axis, Et, pt, inertia, grav = tree.arrays()
    _, id_q, id_v = _dyn._rnea_derivs(
        parent, jtype, axis, Et, pt, inertia, grav, q, v, a, links, offs, forces)
    id_a = _dyn._crba(parent, jtype, axis, Et, pt, inertia, q)
    id_f = _dyn._contact_force_jacobian(parent, jtype, axis, Et, pt, q, links, offs)
    return IdDerivatives(id_q, id_v, id_a, id_f)


def contact_constraint(tree: KinematicTree, q, v, a, frame: str, p_ref,
                       omega: float, zeta: float, n_f: int = 0) -> ConstraintRows:
    """Stabilized contact-acceleration rows for one contact point.

    The residual is ``acc + 2*zeta*omega*vel + omega**2 * (pos - p_ref)`` of
    the frame origin; it involves only (q, v, a), so the f and u Jacobian
    blocks are zero.
    """
    if omega <= 0.0 or zeta <= 0.0:
        raise ValueError("stabilization gains omega and zeta must be positive")
    q = tree.check_vector(q, "q")
    v = tree.check_vector(v, "v")
    a = tree.check_vector(a, "a")
    p_ref = np.asarray(p_ref, dtype=float).reshape(3)
    link, offset = tree.frame(frame)
    parent, jtype, axis, Et, pt, _, _ = tree.arrays()
    pos, vel, acc, J, dvel_dq, dacc_dq, dvel_dv, dacc_dv = _dyn._point_acc_derivs(
        parent, jtype, axis, Et, pt, q, v, a, link, offset.translation)
    k = 2.0 * zeta * omega
    value = acc + k * vel + omega**2 * (pos - p_ref)
    jac_q = dacc_dq + k * dvel_dq + omega**2 * J
    jac_v = dacc_dv + k * dvel_dv
    n = tree.nv
    return ConstraintRows(value, jac_q, jac_v, J.copy(),
                          np.zeros((3, n_f)), np.zeros((3, n)))


def fd_jacobian(func, point, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a vector function at ``point``."""
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    point = np.asarray(point, dtype=float).reshape(-1)
    n = point.shape[0]
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((np.asarray(func(point + e), dtype=float)
                     - np.asarray(func(point - e), dtype=float)) / (2.0 * h))
    return np.stack(cols, axis=-1)
