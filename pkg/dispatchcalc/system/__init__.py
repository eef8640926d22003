"""Power system data, cost evaluation and the exact economic dispatch solver."""

from .cost import Violations, constant_cost, total_cost, violations
from .loader import load_bundled_system, load_system
from .model import Dispatch, EdSolution, GeneratorUnit, PowerSystem
from .solver import KktResiduals, kkt_residuals, solve_ed

__all__ = [
    "Dispatch",
    "EdSolution",
    "GeneratorUnit",
    "KktResiduals",
    "PowerSystem",
    "Violations",
    "constant_cost",
    "kkt_residuals",
    "load_bundled_system",
    "load_system",
    "solve_ed",
    "total_cost",
    "violations",
]
