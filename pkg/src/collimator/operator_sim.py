"""Deterministic simulated operator closing the guidance loop headlessly.

This is a test oracle, not a cognitive model.  The operator sees the widget
exactly as a human would: with the collimation widget, per-component errors
arrive visually amplified, so perception noise is negligible and the stop
decision is gated by the widget itself (full collimation).  With the baseline
cylinders, the operator perceives the target only directly, through a
per-trial perception bias plus per-step jitter, and confirms as soon as the
placement *looks* within tolerance - which is exactly how the baseline trades
precision for speed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .acw import AcwFrame, EcwConfig, EcwKind, acw_frame, default_acw_configs
from .pose import Pose, UnitQuat, Vec3, angular_error, error_state, swing_twist
from .session import Session, Target, TrialRecord, Widget


@dataclass(frozen=True)
class OperatorParams:
    k: float = 0.4                     # per-step proportional motion gain
    sigma_motor_mm: float = 0.05       # motor noise on an executed translation
    sigma_motor_deg: float = 0.05      # motor noise on an executed rotation
    sigma_perception_mm: float = 2.0   # unamplified perception of position
    sigma_perception_deg: float = 2.0  # unamplified perception of direction
    reaction_steps: int = 1            # steps between perceptual re-reads
    max_steps: int = 400
    step_ms: float = 50.0              # nominal duration of one motor step
    attention: str = "max_ratio"       # "max_ratio" | "round_robin"

    def __post_init__(self):
        if not (0.0 < self.k < 1.0):
            raise ValueError("motion gain k must be in (0, 1)")
        for name in ("sigma_motor_mm", "sigma_motor_deg",
                     "sigma_perception_mm", "sigma_perception_deg"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.max_steps <= 0 or self.reaction_steps <= 0:
            raise ValueError("max_steps and reaction_steps must be positive")


@dataclass(frozen=True)
class TrialRun:
    record: TrialRecord
    steps: int
    timed_out: bool


_ROT_AXIS = {EcwKind.AEX: Vec3(1, 0, 0), EcwKind.AEZ: Vec3(0, 0, 1)}


def step_acw(
    tool: Pose,
    target: Pose,
    frame: AcwFrame,
    params: OperatorParams,
    rng: random.Random,
    round_robin_index: int = 0,
) -> Pose:
    """Correct the single most salient visible component toward zero.

    Angular corrections are applied in the error frame so one step changes
    exactly one Euler component; hidden components are only ever disturbed
    by motor noise.
    """
    visible = [s for s in frame.ecws if s.visible]
    if not visible:
        return tool
    if params.attention == "round_robin":
        state = visible[round_robin_index % len(visible)]
    else:
        state = max(visible, key=lambda s: abs(s.e) / s.config.acce)
    delta = -params.k * state.e
    kind = state.config.kind
    if kind.is_positional:
        if params.sigma_motor_mm > 0:
            delta += rng.gauss(0.0, params.sigma_motor_mm)
        move = {EcwKind.PEX: Vec3(delta, 0, 0),
                EcwKind.PEY: Vec3(0, delta, 0),
                EcwKind.PEZ: Vec3(0, 0, delta)}[kind]
        return Pose(tool.position + move, tool.orientation)
    if params.sigma_motor_deg > 0:
        delta += rng.gauss(0.0, params.sigma_motor_deg)
    ae = angular_error(tool.orientation, target.orientation)
    rot = UnitQuat.from_axis_angle(_ROT_AXIS[kind], delta)
    # Post-multiplying shifts only the X Euler component, pre-multiplying
    # only the Z one (extrinsic X-Y-Z).
    new_ae = ae * rot if kind is EcwKind.AEX else rot * ae
    return Pose(tool.position, new_ae * target.orientation)


@dataclass
class _GswPerception:
    """Per-trial systematic misperception of the target pose."""

    position_bias: Vec3
    orientation_bias: UnitQuat

    @staticmethod
    def sample(params: OperatorParams, rng: random.Random) -> "_GswPerception":
        bias = Vec3(
            rng.gauss(0.0, params.sigma_perception_mm),
            rng.gauss(0.0, params.sigma_perception_mm),
            rng.gauss(0.0, params.sigma_perception_mm),
        )
        angle = rng.gauss(0.0, params.sigma_perception_deg)
        axis = _random_unit(rng)
        return _GswPerception(bias, UnitQuat.from_axis_angle(axis, angle))

    def perceived_target(self, target: Pose) -> Pose:
        return Pose(target.position + self.position_bias,
                    self.orientation_bias * target.orientation)


def _random_unit(rng: random.Random) -> Vec3:
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return Vec3(r * math.cos(phi), r * math.sin(phi), z)


def _scale_rotation(q: UnitQuat, k: float) -> UnitQuat:
    angle = q.angle_deg()
    if angle < 1e-12:
        return UnitQuat.identity()
    s = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    axis = Vec3(q.x / s, q.y / s, q.z / s)
    return UnitQuat.from_axis_angle(axis, k * angle)


def step_gsw(
    tool: Pose,
    perceived: Pose,
    params: OperatorParams,
    rng: random.Random,
) -> Pose:
    """Move toward the perceived target pose by the motion gain."""
    k = params.k
    move = (perceived.position - tool.position).scaled(k)
    if params.sigma_motor_mm > 0:
        move = move + Vec3(
            rng.gauss(0.0, params.sigma_motor_mm),
            rng.gauss(0.0, params.sigma_motor_mm),
            rng.gauss(0.0, params.sigma_motor_mm),
        )
    delta = angular_error(perceived.orientation, tool.orientation)
    step = _scale_rotation(delta, k)
    if params.sigma_motor_deg > 0:
        step = UnitQuat.from_axis_angle(_random_unit(rng),
                                        rng.gauss(0.0, params.sigma_motor_deg)) * step
    return Pose(tool.position + move, step * tool.orientation)


def _gsw_looks_aligned(tool: Pose, perceived: Pose,
                       pos_threshold: float, ang_threshold: float) -> bool:
    pem = (tool.position - perceived.position).norm()
    ae = angular_error(tool.orientation, perceived.orientation)
    swing_deg, _ = swing_twist(ae, perceived.tool_axis_world())
    return pem <= pos_threshold and swing_deg <= ang_threshold


class Operator:
    """Runs whole trials against a session, advancing an injected clock."""

    def __init__(
        self,
        params: OperatorParams = OperatorParams(),
        acw_configs: tuple[EcwConfig, ...] | None = None,
        gsw_pos_threshold: float = 2.0,
        gsw_ang_threshold: float = 2.0,
        display_scale: float = 0.1,
    ):
        self.params = params
        self.acw_configs = acw_configs if acw_configs is not None else default_acw_configs()
        self.gsw_pos_threshold = gsw_pos_threshold
        self.gsw_ang_threshold = gsw_ang_threshold
        self.display_scale = display_scale

    def run_trial(
        self,
        widget: Widget,
        target: Target,
        session: Session,
        block_index: int,
        seed: int,
        start_pose: Pose = Pose.identity(),
        advance_ms=None,
    ) -> TrialRun:
        """Simulate one trial: begin, iterate motor steps until the widget's
        stopping rule fires (or max_steps), then confirm and log."""
        rng = random.Random(seed)
        params = self.params
        session.begin_trial(block_index, target)
        tool = start_pose
        steps = 0
        timed_out = False
        rr_index = 0
        if widget is Widget.GSW:
            perception = _GswPerception.sample(params, rng)
            perceived = perception.perceived_target(target.pose)
        while True:
            if widget is Widget.ACW:
                frame = acw_frame(tool, target.pose, self.acw_configs,
                                  display_scale=self.display_scale)
                if frame.fully_collimated:
                    break
            else:
                # The baseline gives no amplified cue, so the stop check runs
                # at the operator's perceptual update rate.
                if steps % params.reaction_steps == 0 and _gsw_looks_aligned(
                        tool, perceived, self.gsw_pos_threshold, self.gsw_ang_threshold):
                    break
            if steps >= params.max_steps:
                timed_out = True
                break
            if widget is Widget.ACW:
                tool = step_acw(tool, target.pose, frame, params, rng, rr_index)
                rr_index += 1
            else:
                tool = step_gsw(tool, perceived, params, rng)
            steps += 1
            if advance_ms is not None:
                advance_ms(params.step_ms)
        record = session.confirm_trial(tool, simulated=True)
        return TrialRun(record=record, steps=steps, timed_out=timed_out)
