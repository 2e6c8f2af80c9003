"""Quaternion/vector algebra and the 5DOF error decomposition.

Conventions used across the engine:
  - World frame: X positive toward the user's right, Y positive up,
    Z positive front.  Positions in millimetres.
  - Quaternions are (w, x, y, z), unit norm, canonicalized to w >= 0
    after every product so each rotation has a unique representative.
  - Euler decomposition of the angular error is extrinsic world X-Y-Z
    (rotate about world X first, then Y, then Z).  The X component maps
    to the pitch widget and the Z component to the roll widget; the Y
    component is the task-irrelevant yaw.  Angles in degrees at every
    public boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_UNIT_TOL = 1e-9
_GIMBAL_TOL = 1e-6

# Tool axis in the tool's local frame; the drill bit points along it.
TOOL_AXIS = (0.0, 0.0, 1.0)


class InvalidQuaternionError(ValueError):
    """Raised when an input quaternion is too far from unit norm."""


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite vector ({self.x}, {self.y}, {self.z})")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class UnitQuat:
    """Unit quaternion (w, x, y, z), canonical sign w >= 0."""

    w: float
    x: float
    y: float
    z: float

    @staticmethod
    def identity() -> "UnitQuat":
        return UnitQuat(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def normalized(w: float, x: float, y: float, z: float) -> "UnitQuat":
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n < 1e-12:
            raise InvalidQuaternionError("cannot normalize a near-zero quaternion")
        w, x, y, z = w / n, x / n, y / n, z / n
        if w < 0.0:
            w, x, y, z = -w, -x, -y, -z
        return UnitQuat(w, x, y, z)

    @staticmethod
    def from_axis_angle(axis: Vec3, angle_deg: float) -> "UnitQuat":
        n = axis.norm()
        if n < 1e-12:
            raise ValueError("rotation axis must be non-zero")
        half = math.radians(angle_deg) / 2.0
        s = math.sin(half) / n
        return UnitQuat.normalized(math.cos(half), axis.x * s, axis.y * s, axis.z * s)

    def check_unit(self, tol: float = 1e-6) -> "UnitQuat":
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if abs(n - 1.0) > tol:
            raise InvalidQuaternionError(f"quaternion norm {n} outside 1 +/- {tol}")
        return UnitQuat.normalized(self.w, self.x, self.y, self.z)

    def conjugate(self) -> "UnitQuat":
        # For a unit quaternion the conjugate is the inverse.
        w, x, y, z = self.w, -self.x, -self.y, -self.z
        if w < 0.0:
            w, x, y, z = -w, -x, -y, -z
        return UnitQuat(w, x, y, z)

    def __mul__(self, other: "UnitQuat") -> "UnitQuat":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return UnitQuat.normalized(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def rotate(self, v: Vec3) -> Vec3:
        # q v q* expanded; avoids building intermediate quaternions.
        w, x, y, z = self.w, self.x, self.y, self.z
        tx = 2.0 * (y * v.z - z * v.y)
        ty = 2.0 * (z * v.x - x * v.z)
        tz = 2.0 * (x * v.y - y * v.x)
        return Vec3(
            v.x + w * tx + (y * tz - z * ty),
            v.y + w * ty + (z * tx - x * tz),
            v.z + w * tz + (x * ty - y * tx),
        )

    def angle_deg(self) -> float:
        """Rotation angle in [0, 180] degrees."""
        return math.degrees(2.0 * math.acos(min(1.0, abs(self.w))))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)


@dataclass(frozen=True)
class Pose:
    position: Vec3
    orientation: UnitQuat

    @staticmethod
    def identity() -> "Pose":
        return Pose(Vec3(0.0, 0.0, 0.0), UnitQuat.identity())

    def tool_axis_world(self) -> Vec3:
        return self.orientation.rotate(Vec3(*TOOL_AXIS))


@dataclass(frozen=True)
class ErrorState:
    """Full error decomposition between a tool pose and a target pose."""

    pe: Vec3                 # positional error, mm
    pem: float               # |pe|, mm
    ae: UnitQuat             # angular error quaternion
    aem: float               # rotation angle of ae, degrees
    ae_euler: tuple[float, float, float]   # extrinsic world X-Y-Z, degrees
    swing_deg: float         # angle between the two tool axes, degrees
    twist_deg: float         # signed rotation about the tool axis, degrees
    gimbal_degenerate: bool = False


def positional_error(dp: Vec3, tp: Vec3) -> Vec3:
    """Tip-minus-target position difference, componentwise."""
    return dp - tp


def angular_error(dq: UnitQuat, tq: UnitQuat) -> UnitQuat:
    """Rotation taking the target orientation to the tool orientation."""
    dq = dq.check_unit()
    tq = tq.check_unit()
    return dq * tq.conjugate()


def magnitudes(pe: Vec3, ae: UnitQuat) -> tuple[float, float]:
    """(|pe| in mm, rotation angle of ae in degrees)."""
    return pe.norm(), ae.angle_deg()


def from_euler(ax_deg: float, ay_deg: float, az_deg: float) -> UnitQuat:
    """Compose extrinsic world X-Y-Z rotations into one quaternion."""
    qx = UnitQuat.from_axis_angle(Vec3(1, 0, 0), ax_deg)
    qy = UnitQuat.from_axis_angle(Vec3(0, 1, 0), ay_deg)
    qz = UnitQuat.from_axis_angle(Vec3(0, 0, 1), az_deg)
    return qz * qy * qx


def euler_components(ae: UnitQuat) -> tuple[float, float, float]:
    angles, _ = euler_components_flagged(ae)
    return angles


def euler_components_flagged(ae: UnitQuat) -> tuple[tuple[float, float, float], bool]:
    """Extrinsic world X-Y-Z angles of ``ae`` in degrees, each in (-180, 180].

    Near gimbal lock (middle angle within ~1e-6 deg of +/-90) the X/Z split
    is underdetermined; the Z angle is pinned to 0 by convention and the
    degenerate flag is set, so guidance keeps streaming frames.
    """
    w, x, y, z = ae.w, ae.x, ae.y, ae.z
    # Rotation matrix entries for R = Rz * Ry * Rx.
    r20 = 2.0 * (x * z - w * y)
    s = -r20  # sin of the middle (Y) angle
    s = max(-1.0, min(1.0, s))
    if abs(abs(s) - 1.0) < math.sin(math.radians(_GIMBAL_TOL)):
        ay = math.copysign(90.0, s)
        # cos(b) ~ 0: only (ax -/+ az) is observable; pin az = 0.
        r01 = 2.0 * (x * y - w * z)
        r11 = 1.0 - 2.0 * (x * x + z * z)
        # at b=+90 only (ax - az) is observable, at b=-90 only (ax + az)
        ax = math.degrees(math.atan2(r01, r11)) if s > 0 else math.degrees(math.atan2(-r01, r11))
        return (_wrap_deg(ax), ay, 0.0), True
    r21 = 2.0 * (y * z + w * x)
    r22 = 1.0 - 2.0 * (x * x + y * y)
    r10 = 2.0 * (x * y + w * z)
    r00 = 1.0 - 2.0 * (y * y + z * z)
    ax = math.degrees(math.atan2(r21, r22))
    ay = math.degrees(math.asin(s))
    az = math.degrees(math.atan2(r10, r00))
    return (_wrap_deg(ax), ay, _wrap_deg(az)), False


def _wrap_deg(a: float) -> float:
    a = math.fmod(a, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def swing_twist(ae: UnitQuat, axis: Vec3) -> tuple[float, float]:
    """Split ``ae`` into swing about an axis-orthogonal direction and twist
    about ``axis``; returns (swing_deg, signed twist_deg).

    ae == swing * twist, so swing_deg is the angle between ``axis`` and its
    image under ``ae``.
    """
    swing, twist = swing_twist_quats(ae, axis)
    n = axis.norm()
    ah = axis.scaled(1.0 / n)
    p = ae.x * ah.x + ae.y * ah.y + ae.z * ah.z
    twist_deg = math.degrees(2.0 * math.atan2(p, ae.w))
    return swing.angle_deg(), _wrap_deg(twist_deg)


def swing_twist_quats(ae: UnitQuat, axis: Vec3) -> tuple[UnitQuat, UnitQuat]:
    n = axis.norm()
    if n < 1e-12:
        raise ValueError("swing/twist axis must be non-zero")
    ah = axis.scaled(1.0 / n)
    p = ae.x * ah.x + ae.y * ah.y + ae.z * ah.z
    tn = math.sqrt(ae.w * ae.w + p * p)
    if tn < 1e-12:
        # 180-degree swing exactly orthogonal to the axis: twist undefined,
        # take the identity.
        twist = UnitQuat.identity()
    else:
        twist = UnitQuat.normalized(ae.w, p * ah.x, p * ah.y, p * ah.z)
    swing = ae * twist.conjugate()
    return swing, twist


def error_state(tool: Pose, target: Pose) -> ErrorState:
    """Compute the full positional/angular error decomposition."""
    pe = positional_error(tool.position, target.position)
    ae = angular_error(tool.orientation, target.orientation)
    pem, aem = magnitudes(pe, ae)
    euler, degenerate = euler_components_flagged(ae)
    axis = target.tool_axis_world()
    swing_deg, twist_deg = swing_twist(ae, axis)
    return ErrorState(
        pe=pe, pem=pem, ae=ae, aem=aem, ae_euler=euler,
        swing_deg=swing_deg, twist_deg=twist_deg, gimbal_degenerate=degenerate,
    )
