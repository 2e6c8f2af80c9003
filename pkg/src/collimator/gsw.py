"""Baseline alignment widget: tool-axis and target-axis cylinders with
dynamic red/green coloring.

Coloring uses the swing (axis-to-axis) angle so twist about the drill axis,
which the task does not constrain, can never hold the color at red.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pose import Pose, error_state


@dataclass(frozen=True)
class Cylinder:
    pose: Pose
    length_mm: float
    radius_mm: float


@dataclass(frozen=True)
class GswFrame:
    tool_cylinder: Cylinder
    target_cylinder: Cylinder
    color: str           # "red" | "green"
    pem: float
    aem_swing: float


def gsw_frame(
    tool: Pose,
    target: Pose,
    pos_threshold: float = 2.0,
    ang_threshold: float = 2.0,
    length_mm: float = 20.0,
    radius_mm: float = 1.0,
) -> GswFrame:
    if pos_threshold <= 0 or ang_threshold <= 0:
        raise ValueError("thresholds must be positive")
    err = error_state(tool, target)
    aligned = err.pem <= pos_threshold and err.swing_deg <= ang_threshold
    return GswFrame(
        tool_cylinder=Cylinder(tool, length_mm, radius_mm),
        target_cylinder=Cylinder(target, length_mm, radius_mm),
        color="green" if aligned else "red",
        pem=err.pem,
        aem_swing=err.swing_deg,
    )
