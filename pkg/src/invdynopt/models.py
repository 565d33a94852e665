"""Robot-model ingestion: built-in models and a URDF-subset parser.

Supported URDF elements::

    <robot name>;
    <link name> with optional <inertial> (<origin xyz rpy>, <mass value>,
        <inertia ixx ixy ixz iyy iyz izz>);
    <joint name type> with type in {revolute, continuous, prismatic, fixed},
        <origin xyz rpy>, <parent link>, <child link>, <axis xyz>.

Everything else (visual, collision, meshes, transmissions, limits, mimic,
...) is ignored.  ``continuous`` joints are treated as plain revolute joints;
``floating`` and ``planar`` joints are rejected.  Links without an inertial
tag default to zero mass and inertia.

Built-in models (all invented, documented constants; not measured robots):

    pendulum          1 revolute joint about +y; point mass 1 kg at 0.5 m.
    double_pendulum   two such links in series.
    planar_2link_foot 3-DOF leg: base yaw about +z, then hip and knee pitch
                      about +y moving the two leg links in a vertical plane;
                      a "foot" frame sits at the shank tip.
    chain7            7-DOF serial chain, alternating z/y axes, 0.25 m links,
                      masses 3.0 .. 1.2 kg (stand-in for a 7-DOF manipulator).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np
from scipy.spatial.transform import Rotation

from .model import Joint, KinematicTree, ModelError, SpatialInertia
from .spatial import SpatialTransform

BUILTIN_NAMES = ("pendulum", "double_pendulum", "planar_2link_foot", "chain7")


class UrdfError(ModelError):
    """URDF document that cannot be turned into a model, with location."""


def _rod_inertia(mass, tip, thickness=1e-3):
    """Inertia of a point mass at ``tip`` plus a small isotropic term that
    keeps the joint-space inertia matrix well conditioned."""
    si = SpatialInertia.point_mass(mass, tip)
    return SpatialInertia(mass, si.com, si.inertia + thickness * np.eye(3))


def pendulum(mass: float = 1.0, length: float = 0.5) -> KinematicTree:
    """Single revolute link about +y; angle 0 hangs straight down (z-up)."""
    links = [(SpatialInertia.point_mass(mass, [0.0, 0.0, -length]),
              Joint("revolute", [0.0, 1.0, 0.0], -1))]
    tree = KinematicTree(links, link_names=["arm"],
                         frames={"tip": (0, SpatialTransform(np.eye(3), [0.0, 0.0, -length]))})
    return tree


def double_pendulum() -> KinematicTree:
    links = [
        (SpatialInertia.point_mass(1.0, [0.0, 0.0, -0.5]),
         Joint("revolute", [0.0, 1.0, 0.0], -1)),
        (SpatialInertia.point_mass(1.0, [0.0, 0.0, -0.5]),
         Joint("revolute", [0.0, 1.0, 0.0], 0,
               SpatialTransform(np.eye(3), [0.0, 0.0, -0.5]))),
    ]
    return KinematicTree(links, link_names=["upper", "lower"],
                         frames={"tip": (1, SpatialTransform(np.eye(3), [0.0, 0.0, -0.5]))})


def planar_2link_foot() -> KinematicTree:
    """Two leg links swinging in a vertical plane on a yawing hip; the yaw
    joint makes the foot Jacobian full rank for 3-D contact constraints."""
    links = [
        (SpatialInertia(1.0, [0.0, 0.0, 0.0], 0.02 * np.eye(3)),
         Joint("revolute", [0.0, 0.0, 1.0], -1)),
        (_rod_inertia(1.0, [0.0, 0.0, -0.2]),
         Joint("revolute", [0.0, 1.0, 0.0], 0,
               SpatialTransform(np.eye(3), [0.0, 0.0, -0.1]))),
        (_rod_inertia(0.8, [0.0, 0.0, -0.2]),
         Joint("revolute", [0.0, 1.0, 0.0], 1,
               SpatialTransform(np.eye(3), [0.0, 0.0, -0.4]))),
    ]
    return KinematicTree(links, link_names=["hip", "thigh", "shank"],
                         frames={"foot": (2, SpatialTransform(np.eye(3), [0.0, 0.0, -0.4]))})


_CHAIN_MASSES = (3.0, 2.7, 2.4, 2.1, 1.8, 1.5, 1.2)
_CHAIN_LENGTH = 0.25


def serial_chain(dof: int) -> KinematicTree:
    """Serial revolute chain with alternating z/y axes, used for the
    manipulator-style experiments; parameters repeat every 7 links."""
    if dof < 1:
        raise ModelError("chain needs at least one degree of freedom")
    links = []
    names = []
    for i in range(dof):
        axis = [0.0, 0.0, 1.0] if i % 2 == 0 else [0.0, 1.0, 0.0]
        offset = SpatialTransform(np.eye(3), [0.0, 0.0, _CHAIN_LENGTH]) if i > 0 \
            else SpatialTransform.identity()
        mass = _CHAIN_MASSES[i % 7]
        inertia = SpatialInertia.point_mass(mass, [0.0, 0.05, _CHAIN_LENGTH / 2])
        inertia = SpatialInertia(mass, inertia.com, inertia.inertia + 0.01 * np.eye(3))
        links.append((inertia, Joint("revolute", axis, i - 1, offset)))
        names.append(f"seg{i}")
    frames = {"tool": (dof - 1, SpatialTransform(np.eye(3), [0.0, 0.0, _CHAIN_LENGTH]))}
    return KinematicTree(links, link_names=names, frames=frames)


def builtin(name: str) -> KinematicTree:
    """Deterministic built-in model by name."""
    if name == "pendulum":
        return pendulum()
    if name == "double_pendulum":
        return double_pendulum()
    if name == "planar_2link_foot":
        return planar_2link_foot()
    if name == "chain7":
        return serial_chain(7)
    raise ModelError(f"unknown builtin model {name!r}; available: {BUILTIN_NAMES}")


# -- URDF ---------------------------------------------------------------


def _parse_vec(text, default, what):
    if text is None:
        return np.array(default, dtype=float)
    try:
        v = np.array([float(t) for t in text.split()], dtype=float)
    except ValueError:
        raise UrdfError(f"{what}: cannot parse {text!r} as numbers") from None
    if v.shape[0] != len(default):
        raise UrdfError(f"{what}: expected {len(default)} numbers, got {v.shape[0]}")
    return v


def _origin(elem, what):
    """<origin xyz rpy> as a SpatialTransform (URDF extrinsic-XYZ rpy)."""
    if elem is None:
        return SpatialTransform.identity()
    xyz = _parse_vec(elem.get("xyz"), [0.0, 0.0, 0.0], f"{what}/origin xyz")
    rpy = _parse_vec(elem.get("rpy"), [0.0, 0.0, 0.0], f"{what}/origin rpy")
    R = Rotation.from_euler("xyz", rpy).as_matrix()
    return SpatialTransform(R, xyz)


def _link_inertia(link_elem, name):
    inertial = link_elem.find("inertial")
    if inertial is None:
        return SpatialInertia(0.0)
    where = f"link {name!r}/inertial"
    origin = _origin(inertial.find("origin"), where)
    mass_elem = inertial.find("mass")
    mass = float(mass_elem.get("value", "0")) if mass_elem is not None else 0.0
    inert = inertial.find("inertia")
    if inert is None:
        I_com = np.zeros((3, 3))
    else:
        ixx = float(inert.get("ixx", "0"))
        iyy = float(inert.get("iyy", "0"))
        izz = float(inert.get("izz", "0"))
        ixy = float(inert.get("ixy", "0"))
        ixz = float(inert.get("ixz", "0"))
        iyz = float(inert.get("iyz", "0"))
        I_com = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
    c = origin.translation
    R = origin.rotation
    I_link = R @ I_com @ R.T + mass * ((c @ c) * np.eye(3) - np.outer(c, c))
    try:
        return SpatialInertia(mass, c, I_link)
    except ModelError as exc:
        raise UrdfError(f"{where}: {exc}") from None


def parse_urdf(text: str, gravity=(0.0, 0.0, -9.81)) -> KinematicTree:
    """Parse a URDF document (string) into a :class:`KinematicTree`."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise UrdfError(f"malformed XML: {exc}") from None
    if root.tag != "robot":
        raise UrdfError(f"expected <robot> document, got <{root.tag}>")

    link_elems = {}
    for le in root.findall("link"):
        name = le.get("name")
        if name is None:
            raise UrdfError("link without a name attribute")
        if name in link_elems:
            raise UrdfError(f"duplicate link name {name!r}")
        link_elems[name] = le

    joints = []
    child_of = {}
    children = {name: [] for name in link_elems}
    for je in root.findall("joint"):
        jname = je.get("name", "<unnamed>")
        jtype = je.get("type")
        if jtype in ("floating", "planar") or jtype not in ("revolute", "continuous", "prismatic", "fixed"):
            raise UrdfError(f"joint {jname!r}: unsupported joint type {jtype!r}")
        parent_elem = je.find("parent")
        child_elem = je.find("child")
        if parent_elem is None or child_elem is None:
            raise UrdfError(f"joint {jname!r}: missing <parent> or <child>")
        pname = parent_elem.get("link")
        cname = child_elem.get("link")
        if pname not in link_elems:
            raise UrdfError(f"joint {jname!r}: parent link {pname!r} is not defined")
        if cname not in link_elems:
            raise UrdfError(f"joint {jname!r}: child link {cname!r} is not defined")
        if cname in child_of:
            raise UrdfError(f"link {cname!r} has two parent joints (kinematic loop)")
        child_of[cname] = (jname, jtype, pname, je)
        children[pname].append(cname)
        joints.append(jname)

    roots = [name for name in link_elems if name not in child_of]
    if not roots:
        raise UrdfError("no root link: every link is some joint's child (kinematic loop)")
    if len(roots) > 1:
        raise UrdfError(f"multiple root links: {sorted(roots)}")

    # Depth-first from the root gives a topological order and finds cycles
    # among disconnected components.
    order = []
    stack = [roots[0]]
    while stack:
        name = stack.pop()
        order.append(name)
        stack.extend(reversed(children[name]))
    if len(order) != len(link_elems):
        missing = sorted(set(link_elems) - set(order))
        raise UrdfError(f"links not connected to the root (loop or orphan): {missing}")

    index = {name: i for i, name in enumerate(order)}
    links = []
    for name in order:
        inertia = _link_inertia(link_elems[name], name)
        if name == roots[0]:
            links.append((inertia, Joint("fixed", parent_link=-1)))
            continue
        jname, jtype, pname, je = child_of[name]
        origin = _origin(je.find("origin"), f"joint {jname!r}")
        if jtype == "fixed":
            links.append((inertia, Joint("fixed", parent_link=index[pname], frame_offset=origin)))
            continue
        axis = _parse_vec(je.find("axis").get("xyz") if je.find("axis") is not None else None,
                          [1.0, 0.0, 0.0], f"joint {jname!r}/axis")
        norm = np.linalg.norm(axis)
        if norm < 1e-12:
            raise UrdfError(f"joint {jname!r}: zero axis")
        kind = "revolute" if jtype in ("revolute", "continuous") else "prismatic"
        try:
            links.append((inertia, Joint(kind, axis / norm, index[pname], origin)))
        except ModelError as exc:
            raise UrdfError(f"joint {jname!r}: {exc}") from None

    try:
        return KinematicTree(links, gravity=gravity, link_names=order)
    except ModelError as exc:
        raise UrdfError(str(exc)) from None


def load_urdf(path, gravity=(0.0, 0.0, -9.81)) -> KinematicTree:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_urdf(fh.read(), gravity)


def to_urdf(tree: KinematicTree, name: str = "robot") -> str:
    """Serialize a compiled tree back to URDF (movable joints only)."""
    lines = [f'<robot name="{name}">', '  <link name="base"/>']
    fmt = lambda v: " ".join(repr(float(x)) for x in v)
    for i, (inertia, joint) in enumerate(tree.links):
        lname = tree.link_names[i]
        c = inertia.com
        # URDF stores inertia about the CoM; undo the parallel-axis shift.
        I_com = inertia.inertia - inertia.mass * ((c @ c) * np.eye(3) - np.outer(c, c))
        lines.append(f'  <link name="{lname}">')
        lines.append("    <inertial>")
        lines.append(f'      <origin xyz="{fmt(c)}" rpy="0 0 0"/>')
        lines.append(f'      <mass value="{inertia.mass!r}"/>')
        lines.append(
            '      <inertia ixx="{!r}" ixy="{!r}" ixz="{!r}" iyy="{!r}" iyz="{!r}" izz="{!r}"/>'.format(
                I_com[0, 0], I_com[0, 1], I_com[0, 2], I_com[1, 1], I_com[1, 2], I_com[2, 2]))
        lines.append("    </inertial>")
        lines.append("  </link>")
        parent = "base" if joint.parent_link == -1 else tree.link_names[joint.parent_link]
        rpy = Rotation.from_matrix(joint.frame_offset.rotation).as_euler("xyz")
        lines.append(f'  <joint name="j_{lname}" type="{joint.kind}">')
        lines.append(f'    <origin xyz="{fmt(joint.frame_offset.translation)}" rpy="{fmt(rpy)}"/>')
        lines.append(f'    <parent link="{parent}"/>')
        lines.append(f'    <child link="{lname}"/>')
        lines.append(f'    <axis xyz="{fmt(joint.axis)}"/>')
        lines.append("  </joint>")
    lines.append("</robot>")
    return "\n".join(lines) + "\n"
