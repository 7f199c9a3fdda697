"""Exception types raised across the package."""


class HarmGrowthError(Exception):
    """Base class for all package errors."""


class EmptySection(HarmGrowthError):
    pass


class WindowTooLarge(HarmGrowthError):
    pass


class EmptyCloud(HarmGrowthError):
    pass


class UnsupportedDomain(HarmGrowthError):
    pass


class NoConvergence(HarmGrowthError):
    pass


class InvalidCap(HarmGrowthError):
    pass


class NonpositiveLambda(HarmGrowthError):
    pass


class QuadratureFailure(HarmGrowthError):
    pass


class NoOverlap(HarmGrowthError):
    pass


class SolverDivergence(HarmGrowthError):
    pass


class MaskDegenerate(HarmGrowthError):
    pass


class OutOfWindow(HarmGrowthError):
    pass


class OutsideSection(HarmGrowthError):
    pass


class OutsideCap(HarmGrowthError):
    pass


class OutsideDomain(HarmGrowthError):
    pass


class PathBudgetExceeded(HarmGrowthError):
    pass


class ConfigInvalid(HarmGrowthError):
    """Bad experiment configuration; the message starts with the field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
