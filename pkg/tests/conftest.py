import math
import random

import pytest

from collimator.pose import Pose, UnitQuat, Vec3


def random_quat(rng: random.Random) -> UnitQuat:
    # Shoemake's method: uniform over the rotation group
    u1, u2, u3 = rng.random(), rng.random(), rng.random()
    a, b = math.sqrt(1 - u1), math.sqrt(u1)
    return UnitQuat.normalized(
        a * math.sin(2 * math.pi * u2),
        a * math.cos(2 * math.pi * u2),
        b * math.sin(2 * math.pi * u3),
        b * math.cos(2 * math.pi * u3),
    )


def random_pose(rng: random.Random, scale: float = 100.0) -> Pose:
    pos = Vec3(rng.uniform(-scale, scale), rng.uniform(-scale, scale),
               rng.uniform(-scale, scale))
    return Pose(pos, random_quat(rng))


@pytest.fixture
def rng():
    return random.Random(20240811)
