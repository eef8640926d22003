from .genetic import GaConfig, GaResult, evolve
from .repair import random_feasible_dispatch, repair_balance

__all__ = [
    "GaConfig",
    "GaResult",
    "evolve",
    "random_feasible_dispatch",
    "repair_balance",
]
