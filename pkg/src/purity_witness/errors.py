"""Exception hierarchy shared by every module of the package."""


class PurityWitnessError(Exception):
    """Base class for all errors raised by :mod:`purity_witness`."""


class DimensionError(PurityWitnessError, ValueError):
    """Operand shapes do not agree with each other or with a bipartite space."""


class HermiticityError(PurityWitnessError, ValueError):
    """A matrix is too far from Hermitian to be symmetrized silently."""


class StateError(PurityWitnessError, ValueError):
    """A matrix fails density-matrix validation (trace or positivity)."""


class NumericalError(PurityWitnessError, ArithmeticError):
    """A numerical routine failed or produced a result outside tolerance."""


class ConfigError(PurityWitnessError, ValueError):
    """A scenario configuration is malformed."""


class InvariantViolation(PurityWitnessError, AssertionError):
    """A checked bound or invariant does not hold within tolerance."""
