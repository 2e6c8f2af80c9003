"""HTTP/WebSocket service exposing the guidance engine to interactive
clients.

Stateless frame endpoints compute widget snapshots for arbitrary pose pairs;
the session endpoints drive one interactive participant session at a time
(single operator station, matching the study setup).  The WebSocket carries
the newline-delimited JSON frame protocol, one protocol line per text
message, so socket clients and replay files see identical bytes.
"""

from __future__ import annotations

import io
import time
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from . import protocol
from .acw import acw_frame, WidgetPlacement
from .config import EngineConfig
from .gsw import gsw_frame
from .pose import Pose, UnitQuat, Vec3
from .session import (ProtocolError, Session, TargetGroup, Widget,
                      build_plan, write_records_csv, CSV_COLUMNS)
from .simulate import study_targets


class PoseModel(BaseModel):
    position: list[float] = Field(min_length=3, max_length=3)
    orientation: list[float] = Field(min_length=4, max_length=4)

    def to_pose(self) -> Pose:
        return Pose(Vec3(*self.position), UnitQuat.normalized(*self.orientation))

    @staticmethod
    def from_pose(pose: Pose) -> "PoseModel":
        return PoseModel(position=list(pose.position.as_tuple()),
                         orientation=list(pose.orientation.as_tuple()))


class FramePairRequest(BaseModel):
    tool: PoseModel
    target: PoseModel


class SessionStartRequest(BaseModel):
    participant_id: str
    set: str = Field(pattern="^[AB]$")
    seed: int
    include_training: bool = True


class BlockSummary(BaseModel):
    index: int
    widget: str
    group: str
    n_targets: int


class SessionStartResponse(BaseModel):
    participant_id: str
    set: str
    blocks: list[BlockSummary]


class SessionStatus(BaseModel):
    active: bool
    participant_id: Optional[str] = None
    block: Optional[int] = None
    trial: Optional[int] = None
    trial_active: bool = False
    records: int = 0
    done: bool = False


class ConfirmResponse(BaseModel):
    record: dict
    next_target: Optional[dict] = None
    done: bool = False


def _now_ms() -> float:
    return time.monotonic() * 1000.0


class _InteractiveSession:
    """Walks one participant through the blocks of a plan, in order."""

    def __init__(self, plan, include_training: bool, now_ms=_now_ms):
        self.plan = plan
        self.session = Session(plan, now_ms=now_ms)
        self.block_order = [
            i for i, b in enumerate(plan.blocks)
            if include_training or b.group is not TargetGroup.TRAINING
        ]
        self.cursor = 0          # index into the flattened trial list
        self.trials = [
            (bi, t) for bi in self.block_order for t in plan.blocks[bi].targets
        ]
        self.trial_active = False

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.trials)

    def current(self):
        if self.done:
            raise ProtocolError("session complete")
        return self.trials[self.cursor]

    def begin(self):
        block_index, target = self.current()
        self.session.begin_trial(block_index, target)
        self.trial_active = True
        return block_index, target

    def confirm(self, tool: Pose):
        record = self.session.confirm_trial(tool)
        self.trial_active = False
        self.cursor += 1
        return record

    def widget_for_current(self) -> Widget:
        block_index, _ = self.current()
        return self.plan.blocks[block_index].widget


def create_app(config: EngineConfig | None = None, now_ms=_now_ms) -> FastAPI:
    config = config or EngineConfig()
    app = FastAPI(title="collimator guidance engine")
    app.state.config = config
    app.state.session = None
    app.state.now_ms = now_ms

    acw_configs = config.amplification.configs()
    placement = WidgetPlacement(up_offset_mm=config.widget_up_offset_mm)

    def _acw(tool: Pose, target: Pose) -> dict:
        frame = acw_frame(tool, target, acw_configs, placement, config.display_scale)
        return protocol.acw_frame_to_obj(frame)

    def _gsw(tool: Pose, target: Pose) -> dict:
        frame = gsw_frame(tool, target, config.gsw.pos_threshold,
                          config.gsw.ang_threshold,
                          config.gsw.cylinder_length_mm,
                          config.gsw.cylinder_radius_mm)
        return protocol.gsw_frame_to_obj(frame)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/frame/acw")
    def frame_acw(req: FramePairRequest):
        return protocol.message("acw_frame", _acw(req.tool.to_pose(), req.target.to_pose()))

    @app.post("/frame/gsw")
    def frame_gsw(req: FramePairRequest):
        return protocol.message("gsw_frame", _gsw(req.tool.to_pose(), req.target.to_pose()))

    @app.post("/session/start", response_model=SessionStartResponse)
    def session_start(req: SessionStartRequest):
        if app.state.session is not None and not app.state.session.done:
            raise HTTPException(409, "a session is already active")
        plan = build_plan(req.participant_id, req.set, req.seed, study_targets(config))
        app.state.session = _InteractiveSession(plan, req.include_training,
                                                now_ms=app.state.now_ms)
        return SessionStartResponse(
            participant_id=req.participant_id,
            set=req.set,
            blocks=[BlockSummary(index=i, widget=b.widget.value, group=b.group.value,
                                 n_targets=len(b.targets))
                    for i, b in enumerate(plan.blocks)],
        )

    def _active() -> _InteractiveSession:
        s = app.state.session
        if s is None:
            raise HTTPException(409, "no session started")
        return s

    @app.get("/session/status", response_model=SessionStatus)
    def session_status():
        s = app.state.session
        if s is None:
            return SessionStatus(active=False)
        block, trial = (None, None)
        if not s.done:
            block = s.trials[s.cursor][0]
            trial = s.cursor
        return SessionStatus(active=not s.done, participant_id=s.plan.participant_id,
                             block=block, trial=trial, trial_active=s.trial_active,
                             records=len(s.session.records), done=s.done)

    @app.post("/session/begin")
    def session_begin():
        s = _active()
        try:
            block_index, target = s.begin()
        except ProtocolError as exc:
            raise HTTPException(409, str(exc))
        payload = protocol.target_to_obj(target)
        payload["block"] = block_index
        payload["widget"] = s.plan.blocks[block_index].widget.value
        return protocol.message("target", payload)

    @app.post("/session/frame")
    def session_frame(tool: PoseModel):
        s = _active()
        if not s.trial_active:
            raise HTTPException(409, "no active trial; POST /session/begin first")
        block_index, target = s.current()
        widget = s.plan.blocks[block_index].widget
        pose = tool.to_pose()
        if widget is Widget.ACW:
            return protocol.message("acw_frame", _acw(pose, target.pose))
        return protocol.message("gsw_frame", _gsw(pose, target.pose))

    @app.post("/session/confirm", response_model=ConfirmResponse)
    def session_confirm(tool: PoseModel):
        s = _active()
        if not s.trial_active:
            raise HTTPException(409, "no active trial to confirm")
        record = s.confirm(tool.to_pose())
        next_target = None
        if not s.done:
            bi, t = s.current()
            next_target = protocol.target_to_obj(t)
            next_target["block"] = bi
            next_target["widget"] = s.plan.blocks[bi].widget.value
        return ConfirmResponse(record=protocol.record_to_obj(record),
                               next_target=next_target, done=s.done)

    @app.get("/session/records.csv", response_class=PlainTextResponse)
    def session_records():
        s = _active()
        buf = io.StringIO()
        import csv as _csv
        from .session import _fmt
        w = _csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in s.session.records:
            w.writerow([_fmt(v) for v in [
                r.participant_id, r.set_name, r.block, r.widget.value, r.target_id,
                r.group.value, r.first_of_block, r.tt_ms, r.pem_mm, r.pe_x_mm,
                r.pe_y_mm, r.pe_z_mm, r.aem_deg, r.ae_x_deg, r.ae_y_deg,
                r.ae_z_deg, r.swing_deg,
            ]])
        return buf.getvalue()

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()

        async def send(msg: dict):
            await ws.send_text(protocol.encode_line(msg).rstrip("\n"))

        try:
            while True:
                raw = await ws.receive_text()
                try:
                    import json as _json
                    msg = _json.loads(raw)
                    kind = msg.get("type")
                    payload = msg.get("payload", {})
                    if kind == "pose":
                        s = _active()
                        if not s.trial_active:
                            raise ProtocolError("no active trial")
                        block_index, target = s.current()
                        widget = s.plan.blocks[block_index].widget
                        pose = protocol.pose_from_obj(payload)
                        if widget is Widget.ACW:
                            await send(protocol.message("acw_frame", _acw(pose, target.pose)))
                        else:
                            await send(protocol.message("gsw_frame", _gsw(pose, target.pose)))
                    elif kind == "begin":
                        s = _active()
                        block_index, target = s.begin()
                        obj = protocol.target_to_obj(target)
                        obj["block"] = block_index
                        obj["widget"] = s.plan.blocks[block_index].widget.value
                        await send(protocol.message("target", obj))
                        await send(protocol.message("trial_begin", {
                            "block": block_index, "target_id": target.id,
                            "widget": s.plan.blocks[block_index].widget.value}))
                    elif kind == "confirm":
                        s = _active()
                        record = s.confirm(protocol.pose_from_obj(payload))
                        await send(protocol.message("trial_confirm",
                                                    protocol.record_to_obj(record)))
                    else:
                        await ws.send_json({"type": "error",
                                            "payload": {"message": f"unknown type {kind!r}"}})
                except WebSocketDisconnect:
                    raise
                except Exception as exc:   # malformed input must not kill the stream
                    await ws.send_json({"type": "error", "payload": {"message": str(exc)}})
        except WebSocketDisconnect:
            return

    return app
