"""Dual-quaternion kinematics and vector-field-inequality constraints for
velocity-level robot control, with a small simplex LP solver and a two-arm
scenario runner."""
from .dq import DQ
from .kinematics import Joint, KinematicChain, load_chain
from .lp import CanonicalLP, solve
from .vfi import KEEP_IN, KEEP_OUT, ZoneSpec
from .controller import Gains, Zone, step

__all__ = ["DQ", "Joint", "KinematicChain", "load_chain", "CanonicalLP", "solve",
           "KEEP_IN", "KEEP_OUT", "ZoneSpec", "Gains", "Zone", "step"]
__version__ = "0.1.0"
