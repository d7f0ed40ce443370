"""Exception hierarchy shared by every module of the package."""


class DigraphSpectraError(Exception):
    """Base class for all errors raised by :mod:`digraph_spectra`."""


# degree sequences
class EmptySequence(DigraphSpectraError, ValueError):
    pass


class UnbalancedSums(DigraphSpectraError, ValueError):
    pass


class DegreeTooSmall(DigraphSpectraError, ValueError):
    pass


# sampling / graph construction
class SizeMismatch(DigraphSpectraError, ValueError):
    pass


class TooLarge(DigraphSpectraError, ValueError):
    """An exhaustive enumeration would exceed its configured cap."""


class KindMismatch(DigraphSpectraError, ValueError):
    """A head was given where a tail is expected, or vice versa."""


# linear algebra
class ConvergenceFailure(DigraphSpectraError, ArithmeticError):
    pass


class Singular(DigraphSpectraError, ArithmeticError):
    pass


class DegenerateInnerProduct(DigraphSpectraError, ArithmeticError):
    pass


# paths and tangles
class InconsistentPath(DigraphSpectraError, ValueError):
    pass


class NotTangleFree(DigraphSpectraError, ValueError):
    pass


class BadEll(DigraphSpectraError, ValueError):
    pass


# Markov chains
class Reducible(DigraphSpectraError, ValueError):
    pass


class Periodic(DigraphSpectraError, ValueError):
    pass


# experiments
class ConfigError(DigraphSpectraError, ValueError):
    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class CapExceeded(DigraphSpectraError, RuntimeError):
    pass
