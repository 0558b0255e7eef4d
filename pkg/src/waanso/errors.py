"""Exception hierarchy shared by every module."""


class WaansoError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(WaansoError, ValueError):
    pass


class DegenerateInput(WaansoError, ValueError):
    """Input is well-formed but carries no usable information (e.g. all zeros)."""


class InfeasibleError(WaansoError):
    """More clusters than cores in some application."""


class GuardError(WaansoError):
    """Instance too large for the requested exhaustive method."""


class WorkloadError(WaansoError, ValueError):
    """Base for workload file problems."""


class WorkloadParseError(WorkloadError):
    pass


class DuplicateIdError(WorkloadError):
    pass


class DanglingEndpointError(WorkloadError):
    pass


class SignalLengthError(WorkloadError):
    pass


class CycleError(WorkloadError):
    pass
