"""Experiment protocol: target generation, counterbalanced treatment
ordering, trial lifecycle with injected timing, and CSV logging."""

from __future__ import annotations

import csv
import enum
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .pose import Pose, UnitQuat, Vec3, error_state

CSV_COLUMNS = [
    "participant_id", "set", "block", "widget", "target_id", "group",
    "first_of_block", "tt_ms", "pem_mm", "pe_x_mm", "pe_y_mm", "pe_z_mm",
    "aem_deg", "ae_x_deg", "ae_y_deg", "ae_z_deg", "swing_deg",
]
# Simulated sessions append one extra marker column.
CSV_COLUMNS_SIM = CSV_COLUMNS + ["simulated"]


class TargetGroup(enum.Enum):
    TRAINING = "training"
    MANDIBLE = "mandible"
    MAXILLA = "maxilla"


class Widget(enum.Enum):
    ACW = "ACW"
    GSW = "GSW"


class ProtocolError(RuntimeError):
    """Trial lifecycle used out of order."""


@dataclass(frozen=True)
class Target:
    id: int
    pose: Pose
    group: TargetGroup


@dataclass(frozen=True)
class Block:
    widget: Widget
    group: TargetGroup
    targets: tuple[Target, ...]
    seed: int


@dataclass(frozen=True)
class SessionPlan:
    participant_id: str
    set_name: str            # "A" | "B"
    blocks: tuple[Block, ...]


@dataclass(frozen=True)
class TrialRecord:
    participant_id: str
    set_name: str
    block: int
    widget: Widget
    target_id: int
    group: TargetGroup
    first_of_block: bool
    tt_ms: float
    pem_mm: float
    pe_x_mm: float
    pe_y_mm: float
    pe_z_mm: float
    aem_deg: float
    ae_x_deg: float
    ae_y_deg: float
    ae_z_deg: float
    swing_deg: float
    simulated: bool = False


def direction_quat(direction: Vec3) -> UnitQuat:
    """Minimal rotation taking the local tool axis (+Z) onto ``direction``."""
    n = direction.norm()
    if n < 1e-12:
        raise ValueError("direction must be non-zero")
    d = direction.scaled(1.0 / n)
    # cross(z, d) and dot(z, d)
    axis = Vec3(-d.y, d.x, 0.0)
    c = d.z
    if axis.norm() < 1e-12:
        if c > 0:
            return UnitQuat.identity()
        return UnitQuat.from_axis_angle(Vec3(1, 0, 0), 180.0)
    angle = math.degrees(math.acos(max(-1.0, min(1.0, c))))
    return UnitQuat.from_axis_angle(axis, angle)


def _random_unit_vector(rng: random.Random) -> Vec3:
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    r = math.sqrt(max(0.0, 1.0 - z * z))
    return Vec3(r * math.cos(phi), r * math.sin(phi), z)


def training_targets(
    seed: int,
    n: int = 32,
    radius: float = 300.0,
    center: Vec3 = Vec3(0.0, 0.0, 0.0),
) -> list[Target]:
    """Targets uniform in a ball around the starting tool position, each with
    a random entry direction.  Deterministic per seed."""
    if n <= 0 or radius <= 0:
        raise ValueError("n and radius must be positive")
    rng = random.Random(seed)
    out = []
    for i in range(n):
        # radius^(1/3) scaling gives uniform density in the ball
        r = radius * rng.random() ** (1.0 / 3.0)
        pos = center + _random_unit_vector(rng).scaled(r)
        tq = direction_quat(_random_unit_vector(rng))
        out.append(Target(id=i, pose=Pose(pos, tq), group=TargetGroup.TRAINING))
    return out


@dataclass(frozen=True)
class ArchParams:
    """Parabolic dental-arch geometry, mm.  Stand-in for clinician-placed
    coordinates; replaceable via the config file."""

    half_width: float = 30.0
    depth: float = 45.0
    teeth_per_arch: int = 16
    mandible_y: float = -20.0
    maxilla_y: float = 20.0
    tilt_deg: float = 8.0      # outward tilt at the arch ends


def arch_targets(group: TargetGroup, params: ArchParams = ArchParams()) -> list[Target]:
    """One target per tooth along a left-right symmetric parabolic arch.

    Mandibular entry directions point up (implant drilled downward into the
    lower jaw, axis emerging upward); maxillary point down.
    """
    if group not in (TargetGroup.MANDIBLE, TargetGroup.MAXILLA):
        raise ValueError(f"arch group must be mandible or maxilla, got {group}")
    n = params.teeth_per_arch
    mandible = group is TargetGroup.MANDIBLE
    y = params.mandible_y if mandible else params.maxilla_y
    y_sign = 1.0 if mandible else -1.0
    base = 0 if mandible else n
    out = []
    for i in range(n):
        t = -1.0 + 2.0 * i / (n - 1)          # -1 .. 1 across the arch
        x = params.half_width * t
        z = params.depth * (1.0 - t * t)
        # Outward tilt grows toward the arch ends, mirrored left/right.
        tilt = params.tilt_deg * t
        d = Vec3(
            math.sin(math.radians(tilt)),
            y_sign * math.cos(math.radians(tilt)),
            0.0,
        )
        out.append(Target(id=base + i, pose=Pose(Vec3(x, y, z), direction_quat(d)), group=group))
    return out


LATIN_SQUARE_ORDERS: dict[str, list[tuple[Widget, TargetGroup]]] = {
    "A": [
        (Widget.GSW, TargetGroup.TRAINING),
        (Widget.ACW, TargetGroup.TRAINING),
        (Widget.GSW, TargetGroup.MANDIBLE),
        (Widget.GSW, TargetGroup.MAXILLA),
        (Widget.ACW, TargetGroup.MANDIBLE),
        (Widget.ACW, TargetGroup.MAXILLA),
    ],
    "B": [
        (Widget.ACW, TargetGroup.TRAINING),
        (Widget.GSW, TargetGroup.TRAINING),
        (Widget.ACW, TargetGroup.MANDIBLE),
        (Widget.GSW, TargetGroup.MANDIBLE),
        (Widget.ACW, TargetGroup.MAXILLA),
        (Widget.GSW, TargetGroup.MAXILLA),
    ],
}


def build_plan(
    participant_id: str,
    set_name: str,
    seed: int,
    targets_by_group: dict[TargetGroup, Sequence[Target]],
) -> SessionPlan:
    """Counterbalanced block sequence with per-block shuffled target order."""
    if set_name not in LATIN_SQUARE_ORDERS:
        raise ValueError(f"set must be A or B, got {set_name!r}")
    blocks = []
    for idx, (widget, group) in enumerate(LATIN_SQUARE_ORDERS[set_name]):
        block_seed = seed * 1000 + idx
        order = list(targets_by_group[group])
        random.Random(block_seed).shuffle(order)
        blocks.append(Block(widget=widget, group=group, targets=tuple(order), seed=block_seed))
    return SessionPlan(participant_id=participant_id, set_name=set_name, blocks=tuple(blocks))


@dataclass
class TrialClock:
    block_index: int
    target: Target
    widget: Widget
    started_ms: float
    first_of_block: bool


class Session:
    """Runs one participant through a plan; time source is injected so tests
    and simulations never sleep."""

    def __init__(self, plan: SessionPlan, now_ms: Callable[[], float]):
        self.plan = plan
        self._now_ms = now_ms
        self._active: TrialClock | None = None
        self._trials_confirmed_in_block: dict[int, int] = {}
        self.records: list[TrialRecord] = []

    def begin_trial(self, block_index: int, target: Target) -> TrialClock:
        if self._active is not None:
            raise ProtocolError("a trial is already active; confirm it first")
        block = self.plan.blocks[block_index]
        first = self._trials_confirmed_in_block.get(block_index, 0) == 0
        self._active = TrialClock(
            block_index=block_index,
            target=target,
            widget=block.widget,
            started_ms=self._now_ms(),
            first_of_block=first,
        )
        return self._active

    def confirm_trial(self, tool: Pose, simulated: bool = False) -> TrialRecord:
        if self._active is None:
            raise ProtocolError("no active trial to confirm")
        clock = self._active
        err = error_state(tool, clock.target.pose)
        record = TrialRecord(
            participant_id=self.plan.participant_id,
            set_name=self.plan.set_name,
            block=clock.block_index,
            widget=clock.widget,
            target_id=clock.target.id,
            group=clock.target.group,
            first_of_block=clock.first_of_block,
            tt_ms=self._now_ms() - clock.started_ms,
            pem_mm=err.pem,
            pe_x_mm=err.pe.x,
            pe_y_mm=err.pe.y,
            pe_z_mm=err.pe.z,
            aem_deg=err.aem,
            ae_x_deg=err.ae_euler[0],
            ae_y_deg=err.ae_euler[1],
            ae_z_deg=err.ae_euler[2],
            swing_deg=err.swing_deg,
            simulated=simulated,
        )
        self.records.append(record)
        self._trials_confirmed_in_block[clock.block_index] = (
            self._trials_confirmed_in_block.get(clock.block_index, 0) + 1
        )
        self._active = None
        return record


def drop_first_trials(records: Iterable[TrialRecord]) -> list[TrialRecord]:
    """Exclude the first confirmed trial of every block (treatment-change
    artifact): a 30x2x32 study set reduces to the 1800 analyzed entries."""
    return [r for r in records if not r.first_of_block]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)   # round-trips bit-exactly
    return str(value)


def write_records_csv(path: str, records: Sequence[TrialRecord], simulated: bool = False) -> None:
    columns = CSV_COLUMNS_SIM if simulated else CSV_COLUMNS
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            row = [
                r.participant_id, r.set_name, r.block, r.widget.value, r.target_id,
                r.group.value, r.first_of_block, r.tt_ms, r.pem_mm, r.pe_x_mm,
                r.pe_y_mm, r.pe_z_mm, r.aem_deg, r.ae_x_deg, r.ae_y_deg,
                r.ae_z_deg, r.swing_deg,
            ]
            if simulated:
                row.append(r.simulated)
            w.writerow([_fmt(v) for v in row])


def read_records_csv(path: str) -> list[TrialRecord]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV, no header row")
        missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        out = []
        for row in reader:
            out.append(TrialRecord(
                participant_id=row["participant_id"],
                set_name=row["set"],
                block=int(row["block"]),
                widget=Widget(row["widget"]),
                target_id=int(row["target_id"]),
                group=TargetGroup(row["group"]),
                first_of_block=row["first_of_block"] == "true",
                tt_ms=float(row["tt_ms"]),
                pem_mm=float(row["pem_mm"]),
                pe_x_mm=float(row["pe_x_mm"]),
                pe_y_mm=float(row["pe_y_mm"]),
                pe_z_mm=float(row["pe_z_mm"]),
                aem_deg=float(row["aem_deg"]),
                ae_x_deg=float(row["ae_x_deg"]),
                ae_y_deg=float(row["ae_y_deg"]),
                ae_z_deg=float(row["ae_z_deg"]),
                swing_deg=float(row["swing_deg"]),
                simulated=row.get("simulated", "false") == "true",
            ))
        return out
