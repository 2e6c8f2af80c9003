import pytest

from collimator.gsw import gsw_frame
from collimator.pose import Pose, UnitQuat, Vec3
from conftest import random_pose


def test_aligned_is_green():
    p = Pose(Vec3(1, 2, 3), UnitQuat.from_axis_angle(Vec3(0, 1, 0), 45))
    frame = gsw_frame(p, p)
    assert frame.color == "green"
    assert frame.pem == 0.0
    assert frame.aem_swing == pytest.approx(0.0, abs=1e-9)


def test_position_off_is_red():
    tool = Pose(Vec3(5, 0, 0), UnitQuat.identity())
    frame = gsw_frame(tool, Pose.identity(), pos_threshold=2.0, ang_threshold=2.0)
    assert frame.color == "red"
    assert frame.pem == 5.0


def test_twist_about_tool_axis_is_ignored():
    # coincident but twisted 30 degrees about the drill axis: still green
    target = Pose(Vec3(0, 0, 0), UnitQuat.identity())
    tool = Pose(Vec3(0, 0, 0), UnitQuat.from_axis_angle(Vec3(0, 0, 1), 30))
    frame = gsw_frame(tool, target)
    assert frame.color == "green"
    assert frame.aem_swing == pytest.approx(0.0, abs=1e-6)


def test_angle_off_is_red():
    tool = Pose(Vec3(0, 0, 0), UnitQuat.from_axis_angle(Vec3(1, 0, 0), 10))
    frame = gsw_frame(tool, Pose.identity(), ang_threshold=2.0)
    assert frame.color == "red"
    assert frame.aem_swing == pytest.approx(10.0, abs=1e-6)


def test_cylinders_carry_input_poses(rng):
    for _ in range(50):
        tool, target = random_pose(rng), random_pose(rng)
        frame = gsw_frame(tool, target, length_mm=25.0, radius_mm=0.5)
        assert frame.tool_cylinder.pose == tool
        assert frame.target_cylinder.pose == target
        assert frame.tool_cylinder.length_mm == 25.0
        assert frame.tool_cylinder.radius_mm == 0.5


def test_color_is_pure_threshold_function(rng):
    for _ in range(200):
        tool, target = random_pose(rng, scale=4), random_pose(rng, scale=4)
        frame = gsw_frame(tool, target, pos_threshold=3.0, ang_threshold=30.0)
        expected = frame.pem <= 3.0 and frame.aem_swing <= 30.0
        assert (frame.color == "green") == expected


def test_rejects_nonpositive_thresholds():
    with pytest.raises(ValueError):
        gsw_frame(Pose.identity(), Pose.identity(), pos_threshold=0.0)
