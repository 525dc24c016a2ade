"""Exception types raised by the package."""


class UnsupportedK(ValueError):
    """The alignment system is only defined for three or more user pairs."""


class Theorem1IsThreeUser(ValueError):
    """The closed-form three-user feasibility condition was given K != 3."""


class Corollary1IsThreeUser(ValueError):
    """The line-of-sight spacing analysis was given K != 3."""


class OrthogonalityViolated(ValueError):
    """A zero spacing multiple was requested (both subcarriers coincide)."""
