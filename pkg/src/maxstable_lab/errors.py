"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A parameter lies outside its admissible range."""


class HorizonError(IndexError):
    """A requested index or horizon exceeds the precomputed tables."""


class EmptyRequestError(ValueError):
    """A sampler was asked for zero draws."""


class ContractViolation(ValueError):
    """Input does not satisfy an operation's precondition."""


class GenerationCapError(RuntimeError):
    """An adaptive sampler generated more points than the configured cap."""
