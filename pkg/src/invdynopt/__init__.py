"""Trajectory optimization for rigid-body systems built on inverse dynamics.

The solver treats configurations, velocities, accelerations, contact forces
and torques all as decision variables, couples them through the inverse
dynamics as an equality constraint, condenses the torque and dynamics
multiplier directions out of each Newton step, and solves the remaining
stage-structured linear system by a Riccati recursion inside a primal-dual
interior-point method.  A single-shooting iLQR baseline and a benchmark
harness are included.
"""

import os

# Allow up to 4 worker threads for the stage-parallel kernels even on small
# machines; must be set before numba initializes its threading layer.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(4, os.cpu_count() or 1)))

from .model import (  # noqa: E402
    Joint,
    KinematicTree,
    ModelError,
    SpatialInertia,
    config_diff,
    config_diff_jacobians,
)
from .spatial import SpatialTransform, SpatialVector  # noqa: E402
from .dynamics import (  # noqa: E402
    SingularDynamicsError,
    aba,
    crba,
    frame_kinematics,
    gravity_compensation,
    rnea,
)
from .derivatives import (  # noqa: E402
    ConstraintRows,
    IdDerivatives,
    contact_constraint,
    fd_jacobian,
    rnea_derivatives,
)
from .models import BUILTIN_NAMES, UrdfError, builtin, load_urdf, parse_urdf, serial_chain, to_urdf  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Joint", "KinematicTree", "ModelError", "SpatialInertia",
    "config_diff", "config_diff_jacobians",
    "SpatialTransform", "SpatialVector",
    "SingularDynamicsError", "aba", "crba", "frame_kinematics",
    "gravity_compensation", "rnea",
    "ConstraintRows", "IdDerivatives", "contact_constraint", "fd_jacobian",
    "rnea_derivatives",
    "BUILTIN_NAMES", "UrdfError", "builtin", "load_urdf", "parse_urdf",
    "serial_chain", "to_urdf",
]
