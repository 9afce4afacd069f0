"""
Error hierarchy for Hubbard VQE Lab
"""


class HubbardVqeError(Exception):
    """Base class for all errors raised by the toolkit"""
    pass


class ConfigError(HubbardVqeError, ValueError):
    """Invalid or unreadable experiment configuration"""
    pass


class UnsupportedLatticeError(HubbardVqeError, ValueError):
    """Lattice shape outside the supported 1xLy / 2xLy family"""
    pass


class ParameterLengthError(HubbardVqeError, ValueError):
    """Parameter vector does not match the ansatz layout"""
    pass


class SimulationInfeasibleError(HubbardVqeError, RuntimeError):
    """Requested simulation exceeds the statevector or sector caps"""
    pass


class NonNativeCircuitError(HubbardVqeError, ValueError):
    """Circuit contains composite gates where native form is required"""
    pass


class EmptyPostselectionError(HubbardVqeError, RuntimeError):
    """Every shot of a batch was rejected by postselection"""
    pass


class NotFloError(HubbardVqeError, ValueError):
    """Parameters with nonzero onsite angles passed as an FLO circuit"""
    pass


class SurrogateError(HubbardVqeError, ArithmeticError):
    """Surrogate belief lost positive definiteness"""
    pass


class UndefinedCorrelationError(HubbardVqeError, ArithmeticError):
    """Normalized correlation requested for a deterministic reference site"""
    pass


class MissingEnergyError(HubbardVqeError, KeyError):
    """Neighboring occupation energy missing for a finite difference"""
    pass
