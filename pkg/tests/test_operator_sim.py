import random
import statistics

import pytest

from collimator.acw import EcwKind, acw_frame, default_acw_configs
from collimator.config import EngineConfig
from collimator.operator_sim import (Operator, OperatorParams, step_acw,
                                     step_gsw, _GswPerception)
from collimator.pose import Pose, UnitQuat, Vec3, error_state
from collimator.session import Session, Target, TargetGroup, Widget, build_plan
from collimator.simulate import simulate_study, study_targets


NOISELESS = OperatorParams(k=0.5, sigma_motor_mm=0.0, sigma_motor_deg=0.0)


def _target(pose):
    return Target(id=0, pose=pose, group=TargetGroup.TRAINING)


class TestStepAcw:
    def test_collimated_frame_is_fixed_point(self):
        tool = target = Pose.identity()
        frame = acw_frame(tool, target)
        rng = random.Random(0)
        assert step_acw(tool, target, frame, NOISELESS, rng) == tool

    def test_proportional_step_single_component(self):
        tool = Pose(Vec3(10, 0, 0), UnitQuat.identity())
        target = Pose.identity()
        frame = acw_frame(tool, target)
        new = step_acw(tool, target, frame, NOISELESS, random.Random(0))
        assert new.position.x == pytest.approx(5.0)
        assert new.position.y == 0.0 and new.position.z == 0.0

    def test_angular_step_changes_single_euler_component(self):
        target = Pose.identity()
        ae = UnitQuat.from_axis_angle(Vec3(1, 0, 0), 10) * \
            UnitQuat.from_axis_angle(Vec3(0, 0, 1), 8)
        tool = Pose(Vec3(0, 0, 0), ae)
        frame = acw_frame(tool, target)
        new = step_acw(tool, target, frame, NOISELESS, random.Random(0))
        e0 = error_state(tool, target).ae_euler
        e1 = error_state(new, target).ae_euler
        changed = [abs(a - b) > 1e-9 for a, b in zip(e0, e1)]
        assert sum(changed) == 1

    def test_noiseless_convergence(self):
        rng = random.Random(1)
        target = Pose(Vec3(80, -40, 120),
                      UnitQuat.from_axis_angle(Vec3(1, 0.3, 0.2), 35))
        tool = Pose.identity()
        for _ in range(200):
            frame = acw_frame(tool, target.__class__(target.position, target.orientation))
            frame = acw_frame(tool, target)
            if frame.fully_collimated:
                break
            tool = step_acw(tool, target, frame, NOISELESS, rng)
        assert frame.fully_collimated
        err = error_state(tool, target)
        assert max(abs(err.pe.x), abs(err.pe.y), abs(err.pe.z)) <= 2.0
        assert abs(err.ae_euler[0]) <= 2.0 and abs(err.ae_euler[2]) <= 2.0

    def test_hidden_components_untouched_without_noise(self):
        target = Pose.identity()
        tool = Pose(Vec3(10, 1.5, 0), UnitQuat.identity())   # PEY collimated
        frame = acw_frame(tool, target)
        new = step_acw(tool, target, frame, NOISELESS, random.Random(0))
        assert new.position.y == tool.position.y


class TestStepGsw:
    def test_geometric_convergence_noise_free(self):
        params = OperatorParams(k=0.5, sigma_motor_mm=0, sigma_motor_deg=0,
                                sigma_perception_mm=0, sigma_perception_deg=0)
        target = Pose(Vec3(50, 20, -30), UnitQuat.from_axis_angle(Vec3(0, 1, 0), 25))
        tool = Pose.identity()
        rng = random.Random(2)
        perceived = _GswPerception.sample(params, rng).perceived_target(target)
        assert perceived == target          # zero perception noise
        for _ in range(40):
            tool = step_gsw(tool, perceived, params, rng)
        err = error_state(tool, target)
        assert err.pem < 1e-6
        assert err.aem < 1e-4

    def test_perception_bias_sets_error_scale(self):
        params = OperatorParams(sigma_perception_mm=2.0)
        finals = []
        for seed in range(200):
            rng = random.Random(seed)
            bias = _GswPerception.sample(params, rng).position_bias
            finals.append(bias.norm())
        # 3D gaussian norm mean = sigma * sqrt(8/pi) ~ 3.2 mm at sigma 2
        assert 2.5 < statistics.mean(finals) < 4.0

    def test_same_seed_same_trajectory(self):
        params = OperatorParams()
        target = Pose(Vec3(30, 0, 0), UnitQuat.identity())

        def run(seed):
            rng = random.Random(seed)
            perceived = _GswPerception.sample(params, rng).perceived_target(target)
            tool = Pose.identity()
            return [tool := step_gsw(tool, perceived, params, rng) for _ in range(20)]

        assert run(7) == run(7)
        assert run(7) != run(8)


def _single_trial_session(target):
    plan = build_plan("p1", "A", 1, {
        TargetGroup.TRAINING: [target],
        TargetGroup.MANDIBLE: [target],
        TargetGroup.MAXILLA: [target],
    })
    clock = type("C", (), {"t": 0.0})()
    return Session(plan, now_ms=lambda: clock.t), clock


class TestRunTrial:
    def test_acw_gate_guarantees_bounds(self):
        operator = Operator(params=NOISELESS)
        for seed in range(30):
            target = _target(Pose(Vec3(40, 20, -10),
                                  UnitQuat.from_axis_angle(Vec3(1, 1, 0), 20)))
            session, clock = _single_trial_session(target)
            run = operator.run_trial(Widget.ACW, target, session, 1, seed,
                                     advance_ms=lambda ms: setattr(clock, "t", clock.t + ms))
            assert not run.timed_out
            r = run.record
            assert max(abs(r.pe_x_mm), abs(r.pe_y_mm), abs(r.pe_z_mm)) <= 2.0
            assert abs(r.ae_x_deg) <= 2.0 and abs(r.ae_z_deg) <= 2.0

    def test_gsw_final_error_can_exceed_threshold(self):
        operator = Operator()
        exceeded = 0
        for seed in range(60):
            target = _target(Pose(Vec3(40, 20, -10), UnitQuat.identity()))
            session, _ = _single_trial_session(target)
            run = operator.run_trial(Widget.GSW, target, session, 0, seed)
            if run.record.pem_mm > 2.0:
                exceeded += 1
        assert exceeded > 10    # perception gate is not a truth gate

    def test_tt_counts_steps(self):
        operator = Operator(params=NOISELESS)
        target = _target(Pose(Vec3(40, 0, 0), UnitQuat.identity()))
        session, clock = _single_trial_session(target)
        run = operator.run_trial(Widget.ACW, target, session, 1, 0,
                                 advance_ms=lambda ms: setattr(clock, "t", clock.t + ms))
        assert run.record.tt_ms == run.steps * NOISELESS.step_ms

    def test_timeout_flag(self):
        params = OperatorParams(k=0.01, max_steps=3, sigma_motor_mm=0, sigma_motor_deg=0)
        operator = Operator(params=params)
        target = _target(Pose(Vec3(200, 0, 0), UnitQuat.identity()))
        session, _ = _single_trial_session(target)
        run = operator.run_trial(Widget.ACW, target, session, 1, 0)
        assert run.timed_out
        assert run.steps == 3

    def test_determinism(self):
        operator = Operator()
        target = _target(Pose(Vec3(25, -10, 60), UnitQuat.from_axis_angle(Vec3(0, 1, 1), 15)))

        def run(seed):
            session, _ = _single_trial_session(target)
            return operator.run_trial(Widget.ACW, target, session, 1, seed).record

        assert run(3) == run(3)

    def test_round_robin_policy_also_converges(self):
        params = OperatorParams(k=0.5, sigma_motor_mm=0, sigma_motor_deg=0,
                                attention="round_robin")
        operator = Operator(params=params)
        target = _target(Pose(Vec3(30, 30, 30), UnitQuat.from_axis_angle(Vec3(1, 0, 0), 25)))
        session, _ = _single_trial_session(target)
        run = operator.run_trial(Widget.ACW, target, session, 1, 0)
        assert not run.timed_out


class TestStudyDirections:
    def test_acw_more_precise_and_slower(self):
        records = simulate_study(4, EngineConfig(), seed=11)
        acw = [r for r in records if r.widget is Widget.ACW]
        gsw = [r for r in records if r.widget is Widget.GSW]
        assert statistics.mean(r.pem_mm for r in acw) < statistics.mean(
            r.pem_mm for r in gsw)
        assert statistics.mean(r.tt_ms for r in acw) > statistics.mean(
            r.tt_ms for r in gsw)

    def test_simulated_flag_set(self):
        records = simulate_study(1, EngineConfig(), seed=1)
        assert all(r.simulated for r in records)

    def test_study_shape(self):
        records = simulate_study(2, EngineConfig(), seed=3)
        # per participant: 2 widgets x (16 mandible + 16 maxilla)
        assert len(records) == 2 * 2 * 32

    def test_params_validation(self):
        with pytest.raises(ValueError):
            OperatorParams(k=0.0)
        with pytest.raises(ValueError):
            OperatorParams(sigma_motor_mm=-1)
