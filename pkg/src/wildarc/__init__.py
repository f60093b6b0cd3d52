"""Wild-arc Morse-Smale diffeomorphisms of the 3-sphere built from Hopf knots.

Modules: ``geometry`` (charts on S^3 and S^2 x S^1), ``knots`` (the
generalized Mazur knots and their tube chart), ``dynamics`` (the model
diffeomorphism, fixed points, separatrices), ``chainrec`` (box-cover chain
recurrence), ``morse`` (critical-point bookkeeping) and ``cli``.
"""
from .errors import (
    ConfigError, DepthTooLarge, DomainEscape, EdgeBudgetExceeded, EscapedTube, InfeasibleSpec,
    NegativeGenus, NoConvergence, NonSmoothNeighborhood, NorthPole, OriginNotCovered, OutsideTube,
    StepTooCoarse, WildarcError,
)
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__",
           "ConfigError", "DepthTooLarge", "DomainEscape", "EdgeBudgetExceeded", "EscapedTube",
           "InfeasibleSpec", "NegativeGenus", "NoConvergence", "NonSmoothNeighborhood", "NorthPole",
           "OriginNotCovered", "OutsideTube", "StepTooCoarse", "WildarcError"]
