"""Exception hierarchy shared by every module of the package."""


class QMachinesError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DimensionMismatch(QMachinesError):
    pass


class NotUnitary(QMachinesError):
    pass


class InvalidMeasurement(QMachinesError):
    pass


class UnknownSymbol(QMachinesError):
    pass


class UnknownOutcome(QMachinesError):
    pass


class InvalidParameter(QMachinesError):
    pass


class InvalidDfa(QMachinesError):
    pass


class AlphabetMismatch(QMachinesError):
    pass


class SearchExhausted(QMachinesError):
    """Randomised multiplier search ran out of its retry budget."""


class MarginViolated(QMachinesError):
    pass


class InvalidInput(QMachinesError):
    pass


class InvalidMachine(QMachinesError):
    pass


class WindowOverflow(QMachinesError):
    """The simulated quantum window would exceed its qubit cap."""


class MalformedOutput(QMachinesError):
    pass


class NoQuantumOutput(QMachinesError):
    pass


class InvalidArgument(QMachinesError):
    pass


class MalformedEncoding(QMachinesError):
    pass


class EmulationMismatch(QMachinesError):
    """The universal emulation diverged from the machine it emulates."""
