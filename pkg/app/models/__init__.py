"""
Domain models package
"""

from .bath import BathSpec, ContinuumBath, DiscreteBath
from .params import ModelParams
from .state import AnsatzState

__all__ = ["BathSpec", "ContinuumBath", "DiscreteBath", "ModelParams", "AnsatzState"]
