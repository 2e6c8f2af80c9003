"""5DOF tool-positioning guidance engine.

Core pieces: pose/error algebra (`pose`), the collimation widget with
amplification and dynamic hiding (`acw`), the cylinder-alignment baseline
(`gsw`), the experiment harness (`session`), a simulated operator
(`operator_sim`, `simulate`), treatment statistics (`stats`), the NDJSON
frame protocol (`protocol`), and the HTTP/WebSocket service (`service`).
"""

from .pose import (ErrorState, Pose, UnitQuat, Vec3, angular_error,
                   error_state, euler_components, from_euler, magnitudes,
                   positional_error, swing_twist)
from .acw import (AcwFrame, EcwConfig, EcwKind, EcwState, WidgetPlacement,
                  acw_frame, collimation_separation, default_acw_configs,
                  ecw_state)
from .gsw import Cylinder, GswFrame, gsw_frame
from .session import (Session, SessionPlan, Target, TargetGroup, TrialRecord,
                      Widget, arch_targets, build_plan, drop_first_trials,
                      read_records_csv, training_targets, write_records_csv)
from .stats import MannWhitneyResult, StatsSummary, analyze, describe, mann_whitney_u

__version__ = "0.1.0"
