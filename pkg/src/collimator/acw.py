"""The collimation widget: five error-component sub-widgets with deadband,
linear amplification, clamping, and dynamic hiding.

Each component widget shows one scalar error (a world-axis position error in
mm or an Euler error angle in degrees) as a pair of facing symbols separated
by an amplified distance.  Inside the accepted-error deadband the separation
is zero and the component hides entirely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .pose import ErrorState, Pose, UnitQuat, Vec3, error_state


class EcwKind(enum.Enum):
    PEX = "PEX"
    PEY = "PEY"
    PEZ = "PEZ"
    AEX = "AEX"
    AEZ = "AEZ"

    @property
    def is_positional(self) -> bool:
        return self in (EcwKind.PEX, EcwKind.PEY, EcwKind.PEZ)


# Direction along which the two symbols of a component separate, in the
# widget-local frame.  Positional components separate along their own axis;
# angular components separate linearly within the plane of their rotation
# (YZ plane for pitch, XY plane for roll).
MOTION_DIRECTION: dict[EcwKind, Vec3] = {
    EcwKind.PEX: Vec3(1, 0, 0),
    EcwKind.PEY: Vec3(0, 1, 0),
    EcwKind.PEZ: Vec3(0, 0, 1),
    EcwKind.AEX: Vec3(0, 0, 1),
    EcwKind.AEZ: Vec3(0, 1, 0),
}

_COLORS = {
    EcwKind.PEX: "red",
    EcwKind.PEY: "green",
    EcwKind.PEZ: "blue",
    EcwKind.AEX: "orange",
    EcwKind.AEZ: "purple",
}


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class EcwConfig:
    """Per-component amplification parameters.

    gain is the dimensionless linear amplification factor, acce the accepted
    error (deadband half-width, mm or degrees), mdt the max distance
    threshold beyond which the amplified separation is clamped.
    """

    kind: EcwKind
    gain: float
    acce: float
    mdt: float
    color: str
    symbol: str

    def __post_init__(self):
        if self.gain <= 0:
            raise ConfigurationError(f"{self.kind.value}: gain must be positive")
        if not (0 <= self.acce < self.mdt):
            raise ConfigurationError(
                f"{self.kind.value}: need 0 <= acce < mdt, got acce={self.acce} mdt={self.mdt}"
            )


@dataclass(frozen=True)
class WidgetPlacement:
    """Widget origin relative to the tool tip, along tool-local axes (mm)."""

    up_offset_mm: float = 40.0


@dataclass(frozen=True)
class EcwState:
    config: EcwConfig
    e: float            # signed component error, mm or degrees
    cs: float           # raw collimator separation (amplified units)
    visible: bool
    collimated: bool
    anchor_a: Pose      # symbol on the positive side, widget-local frame
    anchor_b: Pose      # symbol on the negative side


@dataclass(frozen=True)
class AcwFrame:
    widget_origin: Pose
    ecws: tuple[EcwState, ...]   # ordered PEX, PEY, PEZ, AEX, AEZ
    fully_collimated: bool
    display_scale: float


def collimation_separation(e: float, cfg: EcwConfig) -> float:
    """Amplified symbol separation for a signed component error.

    Zero inside the deadband, gain*|e| in the linear band, clamped to
    gain*mdt beyond the max distance threshold.  Deliberately discontinuous
    at |e| == acce: the jump is invisible because the component hides there.
    """
    a = abs(e)
    if a <= cfg.acce:
        return 0.0
    if a >= cfg.mdt:
        return cfg.gain * cfg.mdt
    return cfg.gain * a


# Orientation flip used so the two anchors face each other.
_FLIP = UnitQuat.from_axis_angle(Vec3(0, 1, 0), 180.0)


def ecw_state(error: ErrorState, cfg: EcwConfig, display_scale: float) -> EcwState:
    """Build one component's state from the full error decomposition.

    The leading anchor (orientation identity) sits on the sign(e) side so the
    glyph's arrow hints at the correction direction.
    """
    if display_scale <= 0:
        raise ConfigurationError("display_scale must be positive")
    e = _component_error(error, cfg.kind)
    cs = collimation_separation(e, cfg)
    collimated = abs(e) <= cfg.acce
    direction = MOTION_DIRECTION[cfg.kind]
    half = cs * display_scale / 2.0
    pos_a = direction.scaled(half)
    pos_b = direction.scaled(-half)
    if e >= 0:
        anchor_a = Pose(pos_a, UnitQuat.identity())
        anchor_b = Pose(pos_b, _FLIP)
    else:
        anchor_a = Pose(pos_a, _FLIP)
        anchor_b = Pose(pos_b, UnitQuat.identity())
    return EcwState(
        config=cfg,
        e=e,
        cs=cs,
        visible=not collimated,
        collimated=collimated,
        anchor_a=anchor_a,
        anchor_b=anchor_b,
    )


def _component_error(error: ErrorState, kind: EcwKind) -> float:
    if kind is EcwKind.PEX:
        return error.pe.x
    if kind is EcwKind.PEY:
        return error.pe.y
    if kind is EcwKind.PEZ:
        return error.pe.z
    if kind is EcwKind.AEX:
        return error.ae_euler[0]
    return error.ae_euler[2]


def acw_frame(
    tool: Pose,
    target: Pose,
    configs: tuple[EcwConfig, ...] | list[EcwConfig] | None = None,
    placement: WidgetPlacement = WidgetPlacement(),
    display_scale: float = 0.1,
) -> AcwFrame:
    """Full widget snapshot for one tool/target pose pair."""
    if configs is None:
        configs = default_acw_configs()
    by_kind = {c.kind: c for c in configs}
    if len(configs) != 5 or len(by_kind) != 5:
        raise ConfigurationError("exactly one config per component kind required")
    err = error_state(tool, target)
    states = tuple(
        ecw_state(err, by_kind[k], display_scale)
        for k in (EcwKind.PEX, EcwKind.PEY, EcwKind.PEZ, EcwKind.AEX, EcwKind.AEZ)
    )
    up_world = tool.orientation.rotate(Vec3(0, 1, 0))
    origin = Pose(tool.position + up_world.scaled(placement.up_offset_mm), tool.orientation)
    return AcwFrame(
        widget_origin=origin,
        ecws=states,
        fully_collimated=all(s.collimated for s in states),
        display_scale=display_scale,
    )


def default_acw_configs(
    pos_gain: float = 50.0,
    pos_acce: float = 2.0,
    pos_mdt: float = 50.0,
    ang_gain: float = 0.1,
    ang_acce: float = 2.0,
    ang_mdt: float = 45.0,
) -> tuple[EcwConfig, ...]:
    """Study defaults: gain 50 / deadband 2 mm / clamp 50 mm positional,
    gain 0.1 / deadband 2 deg / clamp 45 deg angular."""
    out = []
    for kind in EcwKind:
        if kind.is_positional:
            cfg = EcwConfig(kind, pos_gain, pos_acce, pos_mdt, _COLORS[kind], ">")
        else:
            cfg = EcwConfig(kind, ang_gain, ang_acce, ang_mdt, _COLORS[kind], "C")
        out.append(cfg)
    return tuple(out)
