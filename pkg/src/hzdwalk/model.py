"""Model description for planar floating-base rigid-body trees with springs.

A model is a tree of links connected by joints.  Joint ``j`` attaches link
``j`` to its parent link (``parent == -1`` means the world), so links and
joints are index-aligned.  Coordinates are ordered floating base first
(x, z, pitch), then joint angles in joint order.

The bundled "mini Cassie" fixture is a 9-DOF sagittal compliant biped:
3 base coordinates plus hip, knee and a passive shin-spring joint per leg.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .kinematics import FLOATING_BASE, PRISMATIC, REVOLUTE


class ModelError(ValueError):
    """Raised for malformed model descriptions or invalid inputs."""


@dataclass(frozen=True)
class LinkSpec:
    name: str
    mass: float          # kg
    inertia: float       # kg m^2 about the COM
    com: np.ndarray      # COM offset in the link frame, m
    length: float = 0.0  # nominal link length, m (metadata for builders)


@dataclass(frozen=True)
class JointSpec:
    name: str
    kind: str            # floating-base-planar | revolute | prismatic
    parent: int          # parent link index, -1 for world
    origin: np.ndarray   # attachment point in the parent frame, m
    angle: float = 0.0   # fixed attachment rotation, rad
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, -1.0]))
    limits: np.ndarray | None = None   # (ndof, 2) lower/upper
    coord_start: int = 0  # filled in by ModelSpec
    ndof: int = 0


@dataclass(frozen=True)
class ActuatorSpec:
    joint: int
    gear_ratio: float = 1.0
    torque_limit: float = np.inf


@dataclass(frozen=True)
class SpringSpec:
    joint: int
    stiffness: float   # N m / rad
    damping: float     # N m s / rad


@dataclass
class State:
    """Configuration and velocity of the full floating-base system."""

    q: np.ndarray
    dq: np.ndarray

    def __post_init__(self):
        self.q = np.atleast_1d(np.asarray(self.q, dtype=float))
        self.dq = np.atleast_1d(np.asarray(self.dq, dtype=float))
        if self.q.shape != self.dq.shape:
            raise ModelError(f"q and dq shapes differ: {self.q.shape} vs {self.dq.shape}")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.dq))):
            raise ModelError("state contains non-finite entries")

    def copy(self) -> "State":
        return State(self.q.copy(), self.dq.copy())


class ModelSpec:
    """Immutable planar rigid-body tree with actuators and passive springs.

    Precomputes the coordinate layout, the actuation matrix ``B`` (gear
    ratios at actuated coordinates) and the spring selection ``B_s`` so the
    dynamics routines can work with plain arrays.
    """

    def __init__(self, links, joints, actuators=(), springs=(), gravity=9.81, name="model"):
        if len(links) != len(joints):
            raise ModelError("links and joints must be index-aligned (one link per joint)")
        self.name = name
        self.links = tuple(links)
        self.gravity = float(gravity)

        placed = []
        offset = 0
        for j, joint in enumerate(joints):
            if joint.parent >= j:
                raise ModelError(f"joint {j} parent {joint.parent} does not precede it")
            if joint.kind == FLOATING_BASE:
                if joint.parent != -1:
                    raise ModelError("floating base must attach to the world")
                ndof = 3
            elif joint.kind in (REVOLUTE, PRISMATIC):
                ndof = 1
            else:
                raise ModelError(f"unknown joint kind {joint.kind!r}")
            placed.append(JointSpec(joint.name, joint.kind, joint.parent,
                                    np.asarray(joint.origin, dtype=float),
                                    float(joint.angle),
                                    np.asarray(joint.axis, dtype=float),
                                    None if joint.limits is None else np.asarray(joint.limits, dtype=float),
                                    coord_start=offset, ndof=ndof))
            offset += ndof
        self.joints = tuple(placed)
        self.nq = offset

        for link in self.links:
            if link.mass <= 0:
                raise ModelError(f"link {link.name!r} mass must be positive")

        base_coords = set()
        for joint in self.joints:
            if joint.kind == FLOATING_BASE:
                base_coords.update(range(joint.coord_start, joint.coord_start + 3))

        self.actuators = tuple(actuators)
        self.springs = tuple(springs)
        act_coords = [self.joints[a.joint].coord_start for a in self.actuators]
        spring_coords = [self.joints[s.joint].coord_start for s in self.springs]
        if base_coords & set(act_coords):
            raise ModelError("actuators may not act on floating-base coordinates")
        if base_coords & set(spring_coords):
            raise ModelError("springs may not act on floating-base coordinates")
        if set(act_coords) & set(spring_coords):
            raise ModelError("a joint cannot be both actuated and spring-driven")
        for s in self.springs:
            if s.stiffness <= 0:
                raise ModelError("spring stiffness must be positive")

        self.nu = len(self.actuators)
        self.actuated_coords = np.array(act_coords, dtype=int)
        self.spring_coords = np.array(spring_coords, dtype=int)
        self.spring_stiffness = np.array([s.stiffness for s in self.springs])
        self.spring_damping = np.array([s.damping for s in self.springs])
        self.torque_limits = np.array([a.torque_limit for a in self.actuators])

        self.B = np.zeros((self.nq, self.nu))
        for col, a in enumerate(self.actuators):
            self.B[self.joints[a.joint].coord_start, col] = a.gear_ratio
        self.Bs = np.zeros((self.nq, len(self.springs)))
        for col, s in enumerate(self.springs):
            self.Bs[self.joints[s.joint].coord_start, col] = 1.0

        lo = np.full(self.nq, -np.inf)
        hi = np.full(self.nq, np.inf)
        for joint in self.joints:
            if joint.limits is not None:
                lim = np.atleast_2d(joint.limits)
                for k in range(joint.ndof):
                    lo[joint.coord_start + k] = lim[k, 0]
                    hi[joint.coord_start + k] = lim[k, 1]
        self.coord_lower = lo
        self.coord_upper = hi

        self.total_mass = sum(link.mass for link in self.links)

    def joint_index(self, name: str) -> int:
        for j, joint in enumerate(self.joints):
            if joint.name == name:
                return j
        raise ModelError(f"no joint named {name!r}")

    def link_index(self, name: str) -> int:
        for i, link in enumerate(self.links):
            if link.name == name:
                return i
        raise ModelError(f"no link named {name!r}")

    def check_q(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != self.nq:
            raise ModelError(f"configuration has last dim {q.shape[-1]}, expected {self.nq}")
        if not np.all(np.isfinite(q)):
            raise ModelError("configuration contains non-finite entries")
        return q


# ---------------------------------------------------------------------------
# JSON serialization

def model_to_dict(model: ModelSpec) -> dict:
    return {
        "name": model.name,
        "gravity": model.gravity,
        "links": [{"name": l.name, "mass": l.mass, "inertia": l.inertia,
                   "com": list(map(float, l.com)), "length": l.length} for l in model.links],
        "joints": [{"name": j.name, "kind": j.kind, "parent": j.parent,
                    "origin": list(map(float, j.origin)), "angle": j.angle,
                    "axis": list(map(float, j.axis)),
                    "limits": None if j.limits is None else np.asarray(j.limits).tolist()}
                   for j in model.joints],
        "actuators": [{"joint": a.joint, "gear_ratio": a.gear_ratio,
                       "torque_limit": a.torque_limit} for a in model.actuators],
        "springs": [{"joint": s.joint, "stiffness": s.stiffness, "damping": s.damping}
                    for s in model.springs],
    }


def model_from_dict(data: dict) -> ModelSpec:
    try:
        links = [LinkSpec(l.get("name", f"link{i}"), float(l["mass"]), float(l["inertia"]),
                          np.asarray(l["com"], dtype=float), float(l.get("length", 0.0)))
                 for i, l in enumerate(data["links"])]
        joints = [JointSpec(j.get("name", f"joint{i}"), j["kind"], int(j["parent"]),
                            np.asarray(j["origin"], dtype=float), float(j.get("angle", 0.0)),
                            np.asarray(j.get("axis", [0.0, -1.0]), dtype=float),
                            None if j.get("limits") is None else np.asarray(j["limits"], dtype=float))
                  for i, j in enumerate(data["joints"])]
        actuators = [ActuatorSpec(int(a["joint"]), float(a.get("gear_ratio", 1.0)),
                                  float(a.get("torque_limit", np.inf)))
                     for a in data.get("actuators", [])]
        springs = [SpringSpec(int(s["joint"]), float(s["stiffness"]), float(s["damping"]))
                   for s in data.get("springs", [])]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model description: {exc}") from exc
    return ModelSpec(links, joints, actuators, springs,
                     gravity=float(data.get("gravity", 9.81)),
                     name=data.get("name", "model"))


def save_model(model: ModelSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2)


def load_model(path) -> ModelSpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(data)


# ---------------------------------------------------------------------------
# Bundled mini Cassie fixture

@dataclass(frozen=True)
class BipedLayout:
    """Index bookkeeping for the sagittal biped: which coordinates belong to
    which leg, where the feet are, and the left/right relabeling order."""

    base_coords: np.ndarray          # (3,) x, z, pitch
    pitch_coord: int
    left_coords: np.ndarray          # hip, knee, spring
    right_coords: np.ndarray
    hip_coords: np.ndarray           # (2,) left, right
    knee_coords: np.ndarray
    spring_coords: np.ndarray
    foot_links: tuple                # (left link index, right link index)
    foot_point: np.ndarray           # foot point in its link frame
    hip_link: int                    # link carrying the hip attachment (torso)
    thigh_length: float
    shank_length: float              # knee-to-foot distance at zero spring deflection

    def swap_permutation(self, n: int) -> np.ndarray:
        """Signed permutation exchanging the two leg coordinate blocks."""
        perm = np.eye(n)
        for a, b in zip(self.left_coords, self.right_coords):
            perm[[a, b]] = perm[[b, a]]
        return perm


def mini_cassie_dict() -> dict:
    """Parameter dictionary for the bundled desk-scale compliant biped.

    Each leg is hip -> thigh (0.4 m) -> knee -> upper shank (0.1 m) ->
    shin spring -> lower shank (0.3 m) -> point foot.  Shin springs are
    stiff (2000 N m/rad) and lightly damped (2 N m s/rad), so stance-phase
    spring oscillation is visible but bounded.  Knee limits keep the leg
    away from the straight-leg singularity.
    """
    def leg(side, parent_torso=0):
        hip = {"name": f"hip_{side}", "kind": "revolute", "parent": parent_torso,
               "origin": [0.0, 0.0], "angle": 0.0, "limits": [-1.6, 1.6]}
        thigh = {"name": f"thigh_{side}", "mass": 0.8, "inertia": 0.0107,
                 "com": [0.0, -0.2], "length": 0.4}
        knee = {"kind": "revolute", "name": f"knee_{side}",
                "origin": [0.0, -0.4], "angle": 0.0, "limits": [-2.4, -0.1]}
        shank_u = {"name": f"shank_upper_{side}", "mass": 0.3, "inertia": 0.00025,
                   "com": [0.0, -0.05], "length": 0.1}
        spring = {"kind": "revolute", "name": f"shin_spring_{side}",
                  "origin": [0.0, -0.1], "angle": 0.0, "limits": [-0.35, 0.35]}
        shank_l = {"name": f"shank_lower_{side}", "mass": 0.15, "inertia": 0.0011,
                   "com": [0.0, -0.12], "length": 0.3}
        return hip, thigh, knee, shank_u, spring, shank_l

    links = [{"name": "torso", "mass": 6.0, "inertia": 0.08, "com": [0.0, 0.15], "length": 0.4}]
    joints = [{"name": "base", "kind": "floating-base-planar", "parent": -1,
               "origin": [0.0, 0.0], "angle": 0.0,
               "limits": [[-100.0, 100.0], [0.0, 2.0], [-1.0, 1.0]]}]
    for side in ("left", "right"):
        hip, thigh, knee, shank_u, spring, shank_l = leg(side)
        base_link = len(links)
        hip["parent"] = 0
        joints.append(hip); links.append(thigh)
        knee["parent"] = base_link
        joints.append(knee); links.append(shank_u)
        spring["parent"] = base_link + 1
        joints.append(spring); links.append(shank_l)

    return {
        "name": "mini_cassie",
        "gravity": 9.81,
        "links": links,
        "joints": joints,
        "actuators": [{"joint": 1, "gear_ratio": 1.0, "torque_limit": 40.0},
                      {"joint": 2, "gear_ratio": 1.0, "torque_limit": 60.0},
                      {"joint": 4, "gear_ratio": 1.0, "torque_limit": 40.0},
                      {"joint": 5, "gear_ratio": 1.0, "torque_limit": 60.0}],
        "springs": [{"joint": 3, "stiffness": 2000.0, "damping": 2.0},
                    {"joint": 6, "stiffness": 2000.0, "damping": 2.0}],
        "constraints": [
            {"name": "left_foot", "kind": "point-contact-planar",
             "link": 3, "point": [0.0, -0.3], "target": [0.0, 0.0]},
            {"name": "right_foot", "kind": "point-contact-planar",
             "link": 6, "point": [0.0, -0.3], "target": [0.0, 0.0]},
        ],
    }


def mini_cassie() -> tuple[ModelSpec, BipedLayout]:
    """The bundled planar compliant biped and its coordinate layout."""
    data = json.loads(resources.files("hzdwalk.data").joinpath("mini_cassie.json").read_text())
    model = model_from_dict(data)
    layout = BipedLayout(
        base_coords=np.array([0, 1, 2]),
        pitch_coord=2,
        left_coords=np.array([3, 4, 5]),
        right_coords=np.array([6, 7, 8]),
        hip_coords=np.array([3, 6]),
        knee_coords=np.array([4, 7]),
        spring_coords=np.array([5, 8]),
        foot_links=(3, 6),
        foot_point=np.array([0.0, -0.3]),
        hip_link=0,
        thigh_length=0.4,
        shank_length=0.4,
    )
    return model, layout
