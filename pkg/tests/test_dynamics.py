"""Dynamics algorithms against closed-form and mutual-inverse oracles."""

import numpy as np
import pytest

from invdynopt import (
    Joint,
    KinematicTree,
    SpatialInertia,
    SpatialTransform,
    aba,
    builtin,
    config_diff,
    config_diff_jacobians,
    crba,
    fd_jacobian,
    frame_kinematics,
    rnea,
    serial_chain,
)
from conftest import random_state, rng

M_PEND, L_PEND, GRAV = 1.0, 0.5, 9.81


def pendulum_torque_oracle(theta, a):
    """Hand-derived 1-link pendulum: u = m l^2 a + m g l sin(theta)."""
    return M_PEND * L_PEND**2 * a + M_PEND * GRAV * L_PEND * np.sin(theta)


def mixed_tree(gravity=(0.0, 0.0, -9.81)):
    """3-DOF revolute/prismatic/revolute chain exercising both joint kinds."""
    links = [
        (SpatialInertia(1.2, [0.1, 0.0, -0.2], 0.05 * np.eye(3)),
         Joint("revolute", [0.0, 0.0, 1.0], -1)),
        (SpatialInertia(0.7, [0.0, 0.05, -0.1], 0.02 * np.eye(3)),
         Joint("prismatic", [1.0, 0.0, 0.0], 0,
               SpatialTransform(np.eye(3), [0.0, 0.0, -0.3]))),
        (SpatialInertia.point_mass(0.9, [0.0, 0.0, -0.25]),
         Joint("revolute", [0.0, 1.0, 0.0], 1,
               SpatialTransform(np.eye(3), [0.15, 0.0, 0.0]))),
    ]
    return KinematicTree(links, gravity=gravity, link_names=["yaw", "slide", "swing"],
                         frames={"tip": (2, SpatialTransform(np.eye(3), [0.0, 0.0, -0.25]))})


class TestConfigDiff:
    def test_identity(self):
        q = np.array([0.3, -1.2, 4.0])
        np.testing.assert_array_equal(config_diff(q, q), np.zeros(3))

    def test_componentwise(self):
        np.testing.assert_array_equal(config_diff([1.0, 2.0], [0.0, 2.0]), [1.0, 0.0])

    def test_forward_euler_consistency(self):
        q = np.array([0.1, 0.2])
        v = np.array([-1.0, 3.0])
        dt = 0.02
        q_next = q + v * dt
        np.testing.assert_allclose(config_diff(q, q_next) + v * dt, np.zeros(2), atol=1e-15)

    def test_antisymmetry(self):
        gen = rng(3)
        q1, q2 = gen.standard_normal(5), gen.standard_normal(5)
        np.testing.assert_allclose(config_diff(q1, q2), -config_diff(q2, q1))

    def test_jacobians(self):
        J1, J2 = config_diff_jacobians(np.zeros(4), np.ones(4))
        np.testing.assert_array_equal(J1, np.eye(4))
        np.testing.assert_array_equal(J2, -np.eye(4))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            config_diff([1.0], [1.0, 2.0])


class TestRnea:
    def test_all_zero_no_gravity(self):
        tree = mixed_tree(gravity=(0.0, 0.0, 0.0))
        n = tree.nv
        np.testing.assert_allclose(rnea(tree, rng(0).uniform(-1, 1, n), np.zeros(n), np.zeros(n)),
                                   np.zeros(n), atol=1e-14)

    def test_pendulum_closed_form(self):
        tree = builtin("pendulum")
        for theta, a in [(0.0, 0.0), (0.3, 0.0), (-1.2, 2.5), (2.0, -4.0)]:
            u = rnea(tree, [theta], [0.0], [a])
            np.testing.assert_allclose(u[0], pendulum_torque_oracle(theta, a), rtol=1e-12)

    def test_pendulum_velocity_has_no_torque_effect(self):
        # A point-mass pendulum has configuration-independent inertia about
        # its axis, so Coriolis/centrifugal torques vanish.
        tree = builtin("pendulum")
        u1 = rnea(tree, [0.7], [0.0], [1.0])
        u2 = rnea(tree, [0.7], [5.0], [1.0])
        np.testing.assert_allclose(u1, u2, atol=1e-12)

    def test_prismatic_newton_second_law(self):
        links = [(SpatialInertia(2.5), Joint("prismatic", [1.0, 0.0, 0.0], -1))]
        tree = KinematicTree(links, gravity=(0.0, 0.0, -9.81), link_names=["cart"])
        np.testing.assert_allclose(rnea(tree, [0.4], [1.3], [3.0]), [7.5], atol=1e-12)

    def test_linear_in_acceleration(self):
        tree = builtin("chain7")
        gen = rng(11)
        q, v, _ = random_state(tree, gen)
        a1, a2 = gen.standard_normal(7), gen.standard_normal(7)
        al, be = 0.7, -1.3
        lhs = rnea(tree, q, v, al * a1 + be * a2)
        rhs = (al * rnea(tree, q, v, a1) + be * rnea(tree, q, v, a2)
               - (al + be - 1.0) * rnea(tree, q, v, np.zeros(7)))
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_linear_in_contact_force(self):
        tree = builtin("planar_2link_foot")
        gen = rng(12)
        q, v, a = random_state(tree, gen)
        w1, w2 = gen.standard_normal(3), gen.standard_normal(3)
        u0 = rnea(tree, q, v, a)
        u1 = rnea(tree, q, v, a, {"foot": w1})
        u2 = rnea(tree, q, v, a, {"foot": w2})
        u12 = rnea(tree, q, v, a, {"foot": w1 + w2})
        np.testing.assert_allclose(u12 - u0, (u1 - u0) + (u2 - u0), atol=1e-9)

    def test_contact_force_matches_jacobian_transpose(self):
        # rnea's internal force accumulation must agree with the independent
        # geometric Jacobian route: u(f) = u(0) - J^T f.
        tree = builtin("planar_2link_foot")
        gen = rng(13)
        q, v, a = random_state(tree, gen)
        w = gen.standard_normal(3)
        _, _, _, J = frame_kinematics(tree, q, v, a, "foot")
        diff = rnea(tree, q, v, a, {"foot": w}) - rnea(tree, q, v, a)
        np.testing.assert_allclose(diff, -J.T @ w, atol=1e-10)

    def test_unknown_frame(self):
        tree = builtin("pendulum")
        with pytest.raises(ValueError, match="unknown frame"):
            rnea(tree, [0.0], [0.0], [0.0], {"nope": np.zeros(3)})

    def test_dimension_mismatch(self):
        tree = builtin("double_pendulum")
        with pytest.raises(ValueError):
            rnea(tree, [0.0], [0.0, 0.0], [0.0, 0.0])


class TestAba:
    def test_round_trip_chain7(self):
        tree = builtin("chain7")
        gen = rng(21)
        for _ in range(10):
            q, v, _ = random_state(tree, gen, vel_scale=2.0)
            u = gen.standard_normal(7) * 5.0
            a = aba(tree, q, v, u)
            np.testing.assert_allclose(rnea(tree, q, v, a), u, atol=1e-10 * (1 + np.abs(u).max()))

    def test_round_trip_with_contacts(self):
        tree = builtin("planar_2link_foot")
        gen = rng(22)
        q, v, _ = random_state(tree, gen)
        w = {"foot": gen.standard_normal(3)}
        u = gen.standard_normal(3)
        a = aba(tree, q, v, u, w)
        np.testing.assert_allclose(rnea(tree, q, v, a, w), u, atol=1e-10)

    def test_inverse_of_rnea(self):
        tree = mixed_tree()
        gen = rng(23)
        q, v, a_target = random_state(tree, gen)
        u = rnea(tree, q, v, a_target)
        np.testing.assert_allclose(aba(tree, q, v, u), a_target, atol=1e-10)

    def test_zero_everything_no_gravity(self):
        tree = mixed_tree(gravity=(0.0, 0.0, 0.0))
        n = tree.nv
        np.testing.assert_allclose(aba(tree, np.zeros(n), np.zeros(n), np.zeros(n)),
                                   np.zeros(n), atol=1e-14)

    def test_prismatic_unit_mass(self):
        links = [(SpatialInertia(4.0), Joint("prismatic", [0.0, 1.0, 0.0], -1))]
        tree = KinematicTree(links, gravity=(0.0, 0.0, -9.81), link_names=["cart"])
        np.testing.assert_allclose(aba(tree, [0.0], [0.0], [2.0]), [0.5], atol=1e-14)


class TestCrba:
    def test_pendulum_closed_form(self):
        M = crba(builtin("pendulum"), [0.9])
        np.testing.assert_allclose(M, [[M_PEND * L_PEND**2]], rtol=1e-12)

    def test_columns_match_rnea(self, all_builtins):
        gen = rng(31)
        for tree in all_builtins.values():
            q, _, _ = random_state(tree, gen)
            n = tree.nv
            M = crba(tree, q)
            u0 = rnea(tree, q, np.zeros(n), np.zeros(n))
            for j in range(n):
                col = rnea(tree, q, np.zeros(n), np.eye(n)[j]) - u0
                np.testing.assert_allclose(M[:, j], col, atol=1e-10)

    def test_symmetric_positive_definite(self, all_builtins):
        gen = rng(32)
        for tree in all_builtins.values():
            for _ in range(5):
                q, _, _ = random_state(tree, gen)
                M = crba(tree, q)
                assert np.max(np.abs(M - M.T)) < 1e-12
                assert np.linalg.eigvalsh(M).min() > 0.0


class TestFrameKinematics:
    def test_static_frame_is_motionless(self):
        tree = builtin("chain7")
        gen = rng(41)
        q = gen.uniform(-2, 2, 7)
        _, vel, acc, _ = frame_kinematics(tree, q, np.zeros(7), np.zeros(7), "tool")
        np.testing.assert_allclose(vel, np.zeros(3), atol=1e-14)
        np.testing.assert_allclose(acc, np.zeros(3), atol=1e-14)

    def test_pendulum_tip_straight_down(self):
        tree = builtin("pendulum")
        pos, _, _, _ = frame_kinematics(tree, [0.0], [0.0], [0.0], "tip")
        np.testing.assert_allclose(pos, [0.0, 0.0, -L_PEND], atol=1e-14)

    def test_jacobian_matches_finite_differences(self):
        tree = mixed_tree()
        gen = rng(42)
        q, v, a = random_state(tree, gen)

        def pos_of(qq):
            return frame_kinematics(tree, qq, v, a, "tip")[0]

        _, _, _, J = frame_kinematics(tree, q, v, a, "tip")
        np.testing.assert_allclose(J, fd_jacobian(pos_of, q, 1e-6), atol=1e-6)

    def test_velocity_and_acceleration_match_time_differences(self):
        # Integrate q(t) = q + t v + t^2/2 a and difference the position.
        tree = mixed_tree()
        gen = rng(43)
        q, v, a = random_state(tree, gen)

        def pos_at(t):
            return frame_kinematics(tree, q + t * v + 0.5 * t * t * a,
                                    np.zeros(3), np.zeros(3), "tip")[0]

        h = 1e-5
        _, vel, acc, _ = frame_kinematics(tree, q, v, a, "tip")
        np.testing.assert_allclose(vel, (pos_at(h) - pos_at(-h)) / (2 * h), atol=1e-7)
        np.testing.assert_allclose(acc, (pos_at(h) - 2 * pos_at(0.0) + pos_at(-h)) / h**2,
                                   atol=1e-5)

    def test_unknown_frame(self):
        with pytest.raises(ValueError, match="unknown frame"):
            frame_kinematics(builtin("pendulum"), [0.0], [0.0], [0.0], "elbow")


class TestFixedJointMerging:
    def test_fixed_joint_equivalent_to_direct_attachment(self):
        # A massless intermediate link welded in the middle must not change
        # the dynamics compared with composing the offsets directly.
        off1 = SpatialTransform(np.eye(3), [0.0, 0.1, -0.2])
        off2 = SpatialTransform(np.eye(3), [0.05, 0.0, -0.15])
        welded = KinematicTree([
            (SpatialInertia.point_mass(1.0, [0.0, 0.0, -0.3]),
             Joint("revolute", [0.0, 1.0, 0.0], -1)),
            (SpatialInertia(0.4, [0.0, 0.0, -0.05], 0.01 * np.eye(3)),
             Joint("fixed", parent_link=0, frame_offset=off1)),
            (SpatialInertia.point_mass(0.8, [0.0, 0.0, -0.2]),
             Joint("revolute", [1.0, 0.0, 0.0], 1, off2)),
        ], link_names=["arm", "bracket", "hand"])
        direct = KinematicTree([
            (SpatialInertia.point_mass(1.0, [0.0, 0.0, -0.3]),
             Joint("revolute", [0.0, 1.0, 0.0], -1)),
            (SpatialInertia.point_mass(0.8, [0.0, 0.0, -0.2]),
             Joint("revolute", [1.0, 0.0, 0.0], 0, off1.compose(off2))),
        ], link_names=["arm", "hand"])
        assert welded.nv == 2

        gen = rng(51)
        q, v, a = gen.standard_normal(2), gen.standard_normal(2), gen.standard_normal(2)
        u_weld = rnea(welded, q, v, a)
        # RNEA is additive in link inertias; the bracket rides rigidly on the
        # arm, so its torque contribution can be isolated on a 1-DOF model.
        arm = (SpatialInertia.point_mass(1.0, [0.0, 0.0, -0.3]),
               Joint("revolute", [0.0, 1.0, 0.0], -1))
        bracket = (SpatialInertia(0.4, [0.0, 0.0, -0.05], 0.01 * np.eye(3)),
                   Joint("fixed", parent_link=0, frame_offset=off1))
        u_arm_bracket = rnea(KinematicTree([arm, bracket], link_names=["arm", "bracket"]),
                             q[:1], v[:1], a[:1])
        u_arm_alone = rnea(KinematicTree([arm], link_names=["arm"]), q[:1], v[:1], a[:1])
        expected = rnea(direct, q, v, a)
        expected[0] += (u_arm_bracket - u_arm_alone)[0]
        np.testing.assert_allclose(u_weld, expected, atol=1e-10)

    def test_frames_survive_merging(self):
        tree = KinematicTree([
            (SpatialInertia.point_mass(1.0, [0.0, 0.0, -0.5]),
             Joint("revolute", [0.0, 1.0, 0.0], -1)),
            (SpatialInertia(0.0),
             Joint("fixed", parent_link=0,
                   frame_offset=SpatialTransform(np.eye(3), [0.0, 0.0, -0.5]))),
        ], link_names=["arm", "tip_link"])
        assert tree.nv == 1
        pos, _, _, _ = frame_kinematics(tree, [0.0], [0.0], [0.0], "tip_link")
        np.testing.assert_allclose(pos, [0.0, 0.0, -0.5], atol=1e-14)


def test_serial_chain_dof():
    assert serial_chain(14).nv == 14
    assert builtin("chain7").nv == 7
