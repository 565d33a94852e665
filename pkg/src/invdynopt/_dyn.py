"""Compiled rigid-body dynamics kernels.

All kernels work on the compiled model arrays produced by
:meth:`invdynopt.model.KinematicTree.arrays`:

    parent : (nb,) int64, parent link index, -1 for the world
    jtype  : (nb,) int64, 0 revolute / 1 prismatic
    axis   : (nb, 3) joint axis in the child (link) frame
    Et     : (nb, 3, 3) rotation mapping parent coords to joint coords
    pt     : (nb, 3) joint origin in parent coords
    inertia: (nb, 6, 6) spatial inertia in link coords
    grav   : (3,) world gravity

Quantities are expressed in local link coordinates (Featherstone
convention); external contact forces enter as world-frame 3-D point forces
applied at a fixed point of a link.
"""

import numpy as np
from numba import njit

from .spatial import (
    force_cross,
    force_cross_flipped,
    motion_cross,
    motion_transform,
    rotation_about,
    skew,
)

REVOLUTE = 0
PRISMATIC = 1


@njit(cache=True)
def _joint_calc(jtype, axis, Et, pt, q):
    """Joint transform (E, r) into the child frame plus motion subspace S."""
    S = np.zeros(6)
    if jtype == REVOLUTE:
        E = rotation_about(axis, q).T @ Et
        r = pt.copy()
        S[:3] = axis
    else:
        E = Et.copy()
        r = pt + Et.T @ (q * axis)
        S[3:] = axis
    return E, r, S


@njit(cache=True)
def _kin_values(parent, jtype, axis, Et, pt, q, vg, ag, abase):
    """Forward pass: per-link transform, subspace, spatial velocity/acceleration."""
    nb = parent.shape[0]
    X = np.zeros((nb, 6, 6))
    S = np.zeros((nb, 6))
    v = np.zeros((nb, 6))
    a = np.zeros((nb, 6))
    for i in range(nb):
        E, r, Si = _joint_calc(jtype[i], axis[i], Et[i], pt[i], q[i])
        Xi = motion_transform(E, r)
        X[i] = Xi
        S[i] = Si
        p = parent[i]
        vJ = Si * vg[i]
        if p >= 0:
            vi = Xi @ v[p] + vJ
            ai = Xi @ a[p] + Si * ag[i] + motion_cross(vi) @ vJ
        else:
            vi = vJ
            ai = Xi @ abase + Si * ag[i] + motion_cross(vi) @ vJ
        v[i] = vi
        a[i] = ai
    return X, S, v, a


@njit(cache=True)
def _kin_derivs(parent, jtype, axis, Et, pt, q, vg, ag, abase):
    """Forward pass with sensitivities of v and a w.r.t. q and vg.

    The derivative buffers are (nb, 6, nb) arrays; column j of dv_dq[i] is
    the partial of link i's spatial velocity w.r.t. q_j.
    """
    nb = parent.shape[0]
    X, S, v, a = _kin_values(parent, jtype, axis, Et, pt, q, vg, ag, abase)
    dv_dq = np.zeros((nb, 6, nb))
    dv_dv = np.zeros((nb, 6, nb))
    da_dq = np.zeros((nb, 6, nb))
    da_dv = np.zeros((nb, 6, nb))
    for i in range(nb):
        p = parent[i]
        Xi = X[i]
        Si = S[i]
        vJ = Si * vg[i]
        crm_S = motion_cross(Si)
        crm_vJ = motion_cross(vJ)
        if p >= 0:
            Xvp = Xi @ v[p]
            Xap = Xi @ a[p]
            dv_dq[i] = Xi @ dv_dq[p]
            dv_dv[i] = Xi @ dv_dv[p]
            da_dq[i] = Xi @ da_dq[p]
            da_dv[i] = Xi @ da_dv[p]
        else:
            Xvp = np.zeros(6)
            Xap = Xi @ abase
        dv_dq[i, :, i] += -(crm_S @ Xvp)
        dv_dv[i, :, i] += Si
        da_dq[i] += -(crm_vJ @ dv_dq[i])
        da_dq[i, :, i] += -(crm_S @ Xap)
        da_dv[i] += -(crm_vJ @ dv_dv[i])
        da_dv[i, :, i] += motion_cross(v[i]) @ Si
    return X, S, v, a, dv_dq, dv_dv, da_dq, da_dv


@njit(cache=True)
def _world_poses(parent, jtype, axis, Et, pt, q):
    """World rotation and origin of every link frame."""
    nb = parent.shape[0]
    Rw = np.zeros((nb, 3, 3))
    pw = np.zeros((nb, 3))
    for i in range(nb):
        E, r, _ = _joint_calc(jtype[i], axis[i], Et[i], pt[i], q[i])
        p = parent[i]
        if p >= 0:
            Rw[i] = Rw[p] @ E.T
            pw[i] = pw[p] + Rw[p] @ r
        else:
            Rw[i] = E.T
            pw[i] = r
    return Rw, pw


@njit(cache=True)
def _local_contact_forces(parent, jtype, axis, Et, pt, q, c_link, c_off, c_force):
    """External point forces as spatial forces in their link's coordinates."""
    nb = parent.shape[0]
    nc = c_link.shape[0]
    fext = np.zeros((nb, 6))
    if nc == 0:
        return fext
    Rw, _ = _world_poses(parent, jtype, axis, Et, pt, q)
    for k in range(nc):
        l = c_link[k]
        w_loc = Rw[l].T @ c_force[k]
        fext[l, :3] += skew(c_off[k]) @ w_loc
        fext[l, 3:] += w_loc
    return fext


@njit(cache=True)
def _rnea(parent, jtype, axis, Et, pt, inertia, grav, q, vg, ag, c_link, c_off, c_force):
    """Inverse dynamics: joint torques for the given motion and contact forces."""
    nb = parent.shape[0]
    abase = np.zeros(6)
    abase[3:] = -grav
    X, S, v, a = _kin_values(parent, jtype, axis, Et, pt, q, vg, ag, abase)
    fext = _local_contact_forces(parent, jtype, axis, Et, pt, q, c_link, c_off, c_force)
    f = np.zeros((nb, 6))
    for i in range(nb):
        Iv = inertia[i] @ v[i]
        f[i] = inertia[i] @ a[i] + force_cross(v[i]) @ Iv - fext[i]
    tau = np.zeros(nb)
    for i in range(nb - 1, -1, -1):
        tau[i] = S[i] @ f[i]
        p = parent[i]
        if p >= 0:
            f[p] += X[i].T @ f[i]
    return tau


@njit(cache=True)
def _crba(parent, jtype, axis, Et, pt, inertia, q):
    """Joint-space inertia matrix by the composite-rigid-body algorithm."""
    nb = parent.shape[0]
    zeros = np.zeros(nb)
    abase = np.zeros(6)
    X, S, _, _ = _kin_values(parent, jtype, axis, Et, pt, q, zeros, zeros, abase)
    Ic = inertia.copy()
    M = np.zeros((nb, nb))
    for i in range(nb - 1, -1, -1):
        p = parent[i]
        if p >= 0:
            Ic[p] += X[i].T @ Ic[i] @ X[i]
        F = Ic[i] @ S[i]
        M[i, i] = S[i] @ F
        j = i
        while parent[j] >= 0:
            F = X[j].T @ F
            j = parent[j]
            M[i, j] = F @ S[j]
            M[j, i] = M[i, j]
    return M


@njit(cache=True)
def _aba(parent, jtype, axis, Et, pt, inertia, grav, q, vg, tau, c_link, c_off, c_force):
    """Forward dynamics by the articulated-body algorithm.

    Returns (qdd, ok); ok is False when an articulated inertia becomes
    singular (non-physical model).
    """
    nb = parent.shape[0]
    zeros = np.zeros(nb)
    abase = np.zeros(6)
    abase[3:] = -grav
    X, S, v, _ = _kin_values(parent, jtype, axis, Et, pt, q, vg, zeros, np.zeros(6))
    fext = _local_contact_forces(parent, jtype, axis, Et, pt, q, c_link, c_off, c_force)

    c = np.zeros((nb, 6))
    IA = inertia.copy()
    pA = np.zeros((nb, 6))
    for i in range(nb):
        vJ = S[i] * vg[i]
        c[i] = motion_cross(v[i]) @ vJ
        pA[i] = force_cross(v[i]) @ (inertia[i] @ v[i]) - fext[i]

    U = np.zeros((nb, 6))
    d = np.zeros(nb)
    u = np.zeros(nb)
    for i in range(nb - 1, -1, -1):
        U[i] = IA[i] @ S[i]
        d[i] = S[i] @ U[i]
        u[i] = tau[i] - S[i] @ pA[i]
        if d[i] <= 1e-14:
            return np.zeros(nb), False
        p = parent[i]
        if p >= 0:
            Ia = IA[i] - np.outer(U[i], U[i]) / d[i]
            pa = pA[i] + Ia @ c[i] + U[i] * (u[i] / d[i])
            IA[p] += X[i].T @ Ia @ X[i]
            pA[p] += X[i].T @ pa

    qdd = np.zeros(nb)
    a = np.zeros((nb, 6))
    for i in range(nb):
        p = parent[i]
        if p >= 0:
            ai = X[i] @ a[p] + c[i]
        else:
            ai = X[i] @ abase + c[i]
        qdd[i] = (u[i] - U[i] @ ai) / d[i]
        a[i] = ai + S[i] * qdd[i]
    return qdd, True


@njit(cache=True)
def _chain_mask(parent, l):
    """Boolean mask of the joints on the path from link l to the root."""
    nb = parent.shape[0]
    mask = np.zeros(nb, dtype=np.bool_)
    j = l
    while j >= 0:
        mask[j] = True
        j = parent[j]
    return mask


@njit(cache=True)
def _frame_jacobian(parent, jtype, axis, Rw, pw, l, off):
    """World-frame translational Jacobian of the point ``off`` on link ``l``."""
    nb = parent.shape[0]
    J = np.zeros((3, nb))
    if l < 0:
        return J
    pt_w = pw[l] + Rw[l] @ off
    j = l
    while j >= 0:
        ax_w = Rw[j] @ axis[j]
        if jtype[j] == REVOLUTE:
            J[:, j] = np.cross(ax_w, pt_w - pw[j])
        else:
            J[:, j] = ax_w
        j = parent[j]
    return J


@njit(cache=True)
def _point_kinematics(parent, jtype, axis, Et, pt, q, vg, ag, l, off):
    """World position, velocity, classical acceleration and Jacobian of a
    fixed point on link ``l``.  Gravity plays no role (kinematics only)."""
    nb = parent.shape[0]
    Rw, pw = _world_poses(parent, jtype, axis, Et, pt, q)
    J = _frame_jacobian(parent, jtype, axis, Rw, pw, l, off)
    if l < 0:
        return off.copy(), np.zeros(3), np.zeros(3), J
    X, S, v, a = _kin_values(parent, jtype, axis, Et, pt, q, vg, ag, np.zeros(6))
    pos = pw[l] + Rw[l] @ off
    w = v[l, :3]
    vpt = v[l, 3:] + np.cross(w, off)
    vel = Rw[l] @ vpt
    acc_loc = a[l, 3:] + np.cross(a[l, :3], off) + np.cross(w, vpt)
    acc = Rw[l] @ acc_loc
    return pos, vel, acc, J


@njit(cache=True)
def _point_acc_derivs(parent, jtype, axis, Et, pt, q, vg, ag, l, off):
    """Point kinematics plus the q/v sensitivities of its velocity and
    classical acceleration.  Returns (pos, vel, acc, J, dvel_dq, dacc_dq,
    dvel_dv, dacc_dv)."""
    nb = parent.shape[0]
    Rw, pw = _world_poses(parent, jtype, axis, Et, pt, q)
    J = _frame_jacobian(parent, jtype, axis, Rw, pw, l, off)
    X, S, v, a, dv_dq, dv_dv, da_dq, da_dv = _kin_derivs(
        parent, jtype, axis, Et, pt, q, vg, ag, np.zeros(6))

    pos = pw[l] + Rw[l] @ off
    w = v[l, :3]
    vpt = v[l, 3:] + np.cross(w, off)
    vel = Rw[l] @ vpt
    acc_loc = a[l, 3:] + np.cross(a[l, :3], off) + np.cross(w, vpt)
    acc = Rw[l] @ acc_loc

    mask = _chain_mask(parent, l)
    dvel_dq = np.zeros((3, nb))
    dacc_dq = np.zeros((3, nb))
    dvel_dv = np.zeros((3, nb))
    dacc_dv = np.zeros((3, nb))
    for j in range(nb):
        dw = dv_dq[l, :3, j]
        dvo = dv_dq[l, 3:, j]
        dal = da_dq[l, :3, j]
        dao = da_dq[l, 3:, j]
        dvpt = dvo + np.cross(dw, off)
        dvel_dq[:, j] = Rw[l] @ dvpt
        dacc_dq[:, j] = Rw[l] @ (dao + np.cross(dal, off)
                                 + np.cross(dw, vpt) + np.cross(w, dvpt))
        if mask[j] and jtype[j] == REVOLUTE:
            ax_w = Rw[j] @ axis[j]
            dvel_dq[:, j] += np.cross(ax_w, vel)
            dacc_dq[:, j] += np.cross(ax_w, acc)

        dw = dv_dv[l, :3, j]
        dvo = dv_dv[l, 3:, j]
        dal = da_dv[l, :3, j]
        dao = da_dv[l, 3:, j]
        dvpt = dvo + np.cross(dw, off)
        dvel_dv[:, j] = Rw[l] @ dvpt
        dacc_dv[:, j] = Rw[l] @ (dao + np.cross(dal, off)
                                 + np.cross(dw, vpt) + np.cross(w, dvpt))
    return pos, vel, acc, J, dvel_dq, dacc_dq, dvel_dv, dacc_dv


@njit(cache=True)
def _rnea_derivs(parent, jtype, axis, Et, pt, inertia, grav, q, vg, ag,
                 c_link, c_off, c_force):
    """Inverse dynamics value and its exact Jacobians w.r.t. q and vg.

    Direct differentiation of the recursive Newton-Euler passes, including
    the configuration dependence of the world-frame contact forces.
    """
    nb = parent.shape[0]
    nc = c_link.shape[0]
    abase = np.zeros(6)
    abase[3:] = -grav
    X, S, v, a, dv_dq, dv_dv, da_dq, da_dv = _kin_derivs(
        parent, jtype, axis, Et, pt, q, vg, ag, abase)

    f = np.zeros((nb, 6))
    df_dq = np.zeros((nb, 6, nb))
    df_dv = np.zeros((nb, 6, nb))
    for i in range(nb):
        Iv = inertia[i] @ v[i]
        f[i] = inertia[i] @ a[i] + force_cross(v[i]) @ Iv
        mix = force_cross_flipped(Iv) + force_cross(v[i]) @ inertia[i]
        df_dq[i] = inertia[i] @ da_dq[i] + mix @ dv_dq[i]
        df_dv[i] = inertia[i] @ da_dv[i] + mix @ dv_dv[i]

    # World-frame contact forces: propagate the force vector expressed in
    # link coordinates and its q-sensitivity down the support chain.
    for k in range(nc):
        l = c_link[k]
        chain = _chain_mask(parent, l)
        w_loc = np.zeros((nb, 3))
        dw_loc = np.zeros((nb, 3, nb))
        for i in range(nb):
            if not chain[i]:
                continue
            E, _, _ = _joint_calc(jtype[i], axis[i], Et[i], pt[i], q[i])
            p = parent[i]
            if p >= 0:
                w_loc[i] = E @ w_loc[p]
                dw_loc[i] = E @ dw_loc[p]
            else:
                w_loc[i] = E @ c_force[k]
            if jtype[i] == REVOLUTE:
                dw_loc[i, :, i] += -np.cross(axis[i], w_loc[i])
        ox = skew(c_off[k])
        f[l, :3] -= ox @ w_loc[l]
        f[l, 3:] -= w_loc[l]
        df_dq[l, :3] -= ox @ dw_loc[l]
        df_dq[l, 3:] -= dw_loc[l]

    tau = np.zeros(nb)
    id_q = np.zeros((nb, nb))
    id_v = np.zeros((nb, nb))
    for i in range(nb - 1, -1, -1):
        tau[i] = S[i] @ f[i]
        id_q[i] = S[i] @ df_dq[i]
        id_v[i] = S[i] @ df_dv[i]
        p = parent[i]
        if p >= 0:
            XT = X[i].T
            f[p] += XT @ f[i]
            df_dq[p] += XT @ df_dq[i]
            df_dq[p, :, i] += XT @ (force_cross(S[i]) @ f[i])
            df_dv[p] += XT @ df_dv[i]
    return tau, id_q, id_v


@njit(cache=True)
def _contact_force_jacobian(parent, jtype, axis, Et, pt, q, c_link, c_off):
    """-J^T columns: sensitivity of the torques to the world contact forces."""
    nb = parent.shape[0]
    nc = c_link.shape[0]
    id_f = np.zeros((nb, 3 * nc))
    if nc == 0:
        return id_f
    Rw, pw = _world_poses(parent, jtype, axis, Et, pt, q)
    for k in range(nc):
        J = _frame_jacobian(parent, jtype, axis, Rw, pw, c_link[k], c_off[k])
        id_f[:, 3 * k:3 * k + 3] = -J.T
    return id_f
