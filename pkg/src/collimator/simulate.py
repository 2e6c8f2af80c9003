"""Batch simulation of whole counterbalanced studies with the simulated
operator.  Fully deterministic for a given (seed, config)."""

from __future__ import annotations

from dataclasses import dataclass

from .config import EngineConfig
from .operator_sim import Operator, TrialRun
from .pose import Pose, Vec3
from .session import (Session, SessionPlan, Target, TargetGroup, TrialRecord,
                      Widget, arch_targets, build_plan, training_targets)


class _SimClock:
    def __init__(self):
        self.now_ms = 0.0

    def now(self) -> float:
        return self.now_ms

    def advance(self, ms: float) -> None:
        self.now_ms += ms


def study_targets(config: EngineConfig) -> dict[TargetGroup, list[Target]]:
    return {
        TargetGroup.TRAINING: training_targets(
            config.training_seed, config.training_count, config.training_radius_mm),
        TargetGroup.MANDIBLE: arch_targets(TargetGroup.MANDIBLE, config.arch),
        TargetGroup.MAXILLA: arch_targets(TargetGroup.MAXILLA, config.arch),
    }


def make_operator(config: EngineConfig) -> Operator:
    return Operator(
        params=config.operator,
        acw_configs=config.amplification.configs(),
        gsw_pos_threshold=config.gsw.pos_threshold,
        gsw_ang_threshold=config.gsw.ang_threshold,
        display_scale=config.display_scale,
    )


def _trial_seed(seed: int, participant: int, block: int, trial: int) -> int:
    return ((seed * 1_000_003 + participant) * 1_009 + block) * 10_007 + trial


def simulate_participant(
    participant_index: int,
    config: EngineConfig,
    seed: int,
    include_training: bool = False,
    start_pose: Pose = Pose.identity(),
) -> list[TrialRecord]:
    """One participant through their counterbalanced plan (set A for even
    indices, B for odd), tool re-homed at every new target."""
    set_name = "A" if participant_index % 2 == 0 else "B"
    plan = build_plan(f"P{participant_index + 1:02d}", set_name,
                      seed + participant_index, study_targets(config))
    operator = make_operator(config)
    clock = _SimClock()
    session = Session(plan, now_ms=clock.now)
    for block_index, block in enumerate(plan.blocks):
        if block.group is TargetGroup.TRAINING and not include_training:
            continue
        for trial_index, target in enumerate(block.targets):
            operator.run_trial(
                widget=block.widget,
                target=target,
                session=session,
                block_index=block_index,
                seed=_trial_seed(seed, participant_index, block_index, trial_index),
                start_pose=start_pose,
                advance_ms=clock.advance,
            )
    return session.records


def simulate_study(
    n_participants: int,
    config: EngineConfig,
    seed: int,
    include_training: bool = False,
) -> list[TrialRecord]:
    if n_participants <= 0:
        raise ValueError("need at least one participant")
    records: list[TrialRecord] = []
    for p in range(n_participants):
        records.extend(simulate_participant(p, config, seed, include_training))
    return records
