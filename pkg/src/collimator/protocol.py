"""Newline-delimited JSON frame protocol.

Every message is a single JSON object on one line: {"type": ..., "payload":
...}.  Poses travel as a position triple and a (w, x, y, z) orientation
quadruple.  The same encoding is used over sockets, websocket text messages,
and replay files.
"""

from __future__ import annotations

import json
from typing import IO, Iterator

from .acw import AcwFrame, EcwState
from .gsw import Cylinder, GswFrame
from .pose import Pose, UnitQuat, Vec3
from .session import Target, TargetGroup, TrialRecord, Widget

MESSAGE_TYPES = ("acw_frame", "gsw_frame", "trial_begin", "trial_confirm", "target")


class ProtocolDecodeError(ValueError):
    pass


def pose_to_obj(pose: Pose) -> dict:
    return {
        "position": [pose.position.x, pose.position.y, pose.position.z],
        "orientation": [pose.orientation.w, pose.orientation.x,
                        pose.orientation.y, pose.orientation.z],
    }


def pose_from_obj(obj: dict) -> Pose:
    try:
        px, py, pz = obj["position"]
        w, x, y, z = obj["orientation"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolDecodeError(f"malformed pose object: {obj!r}") from exc
    return Pose(Vec3(px, py, pz), UnitQuat.normalized(w, x, y, z))


def _ecw_to_obj(s: EcwState) -> dict:
    return {
        "kind": s.config.kind.value,
        "e": s.e,
        "cs": s.cs,
        "visible": s.visible,
        "color": s.config.color,
        "symbol": s.config.symbol,
        "anchor_a": pose_to_obj(s.anchor_a),
        "anchor_b": pose_to_obj(s.anchor_b),
    }


def acw_frame_to_obj(frame: AcwFrame) -> dict:
    return {
        "origin": pose_to_obj(frame.widget_origin),
        "display_scale": frame.display_scale,
        "fully_collimated": frame.fully_collimated,
        "ecws": [_ecw_to_obj(s) for s in frame.ecws],
    }


def _cylinder_to_obj(c: Cylinder) -> dict:
    return {"pose": pose_to_obj(c.pose), "length_mm": c.length_mm, "radius_mm": c.radius_mm}


def gsw_frame_to_obj(frame: GswFrame) -> dict:
    return {
        "tool_cylinder": _cylinder_to_obj(frame.tool_cylinder),
        "target_cylinder": _cylinder_to_obj(frame.target_cylinder),
        "color": frame.color,
        "pem": frame.pem,
        "aem_swing": frame.aem_swing,
    }


def target_to_obj(target: Target) -> dict:
    return {"id": target.id, "pose": pose_to_obj(target.pose), "group": target.group.value}


def target_from_obj(obj: dict) -> Target:
    try:
        return Target(id=int(obj["id"]), pose=pose_from_obj(obj["pose"]),
                      group=TargetGroup(obj["group"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolDecodeError(f"malformed target object: {obj!r}") from exc


def record_to_obj(r: TrialRecord) -> dict:
    return {
        "participant_id": r.participant_id,
        "set": r.set_name,
        "block": r.block,
        "widget": r.widget.value,
        "target_id": r.target_id,
        "group": r.group.value,
        "first_of_block": r.first_of_block,
        "tt_ms": r.tt_ms,
        "pem_mm": r.pem_mm,
        "pe_x_mm": r.pe_x_mm,
        "pe_y_mm": r.pe_y_mm,
        "pe_z_mm": r.pe_z_mm,
        "aem_deg": r.aem_deg,
        "ae_x_deg": r.ae_x_deg,
        "ae_y_deg": r.ae_y_deg,
        "ae_z_deg": r.ae_z_deg,
        "swing_deg": r.swing_deg,
        "simulated": r.simulated,
    }


def message(msg_type: str, payload: dict) -> dict:
    if msg_type not in MESSAGE_TYPES:
        raise ValueError(f"unknown message type {msg_type!r}")
    return {"type": msg_type, "payload": payload}


def encode_line(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":")) + "\n"


def decode_line(line: str) -> dict:
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolDecodeError(f"invalid JSON: {line[:80]!r}") from exc
    if not isinstance(msg, dict) or "type" not in msg or "payload" not in msg:
        raise ProtocolDecodeError(f"message must have type and payload: {line[:80]!r}")
    if msg["type"] not in MESSAGE_TYPES:
        raise ProtocolDecodeError(f"unknown message type {msg['type']!r}")
    return msg


def read_stream(stream: IO[str]) -> Iterator[dict]:
    """Replay a stream of protocol lines, skipping blank lines."""
    for line in stream:
        if line.strip():
            yield decode_line(line)
