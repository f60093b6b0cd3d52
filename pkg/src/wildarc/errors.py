"""Exception hierarchy shared by every wildarc module."""


class WildarcError(Exception):
    """Base class for all library errors."""


class OriginNotCovered(WildarcError, ValueError):
    pass


class NorthPole(WildarcError, ValueError):
    pass


class InfeasibleSpec(WildarcError, ValueError):
    pass


class OutsideTube(WildarcError, ValueError):
    pass


class StepTooCoarse(WildarcError, ArithmeticError):
    pass


class NonSmoothNeighborhood(WildarcError, ArithmeticError):
    pass


class NoConvergence(WildarcError, ArithmeticError):
    pass


class EscapedTube(WildarcError, RuntimeError):
    pass


class DepthTooLarge(WildarcError, ValueError):
    pass


class DomainEscape(WildarcError, RuntimeError):
    """The image of a box left the domain cube; the cube is not forward invariant."""


class EdgeBudgetExceeded(WildarcError, RuntimeError):
    """Box images are so inflated that the transition graph would not fit in memory."""


class NegativeGenus(WildarcError, ValueError):
    pass


class ConfigError(WildarcError, ValueError):
    pass
