"""Exception types raised across the package."""


class PlanarReachError(Exception):
    """Base class for all errors raised by planar_reach."""


# plane_graph
class NonPlanarRotation(PlanarReachError):
    pass


class MalformedRing(PlanarReachError):
    pass


class DisconnectedInput(PlanarReachError):
    pass


# augment
class EmptyGraph(PlanarReachError):
    pass


class MismatchedStages(PlanarReachError):
    pass


# decomposition
class TooSmall(PlanarReachError):
    pass


class PreconditionViolated(PlanarReachError):
    pass


# monge
class AlreadyOne(PlanarReachError):
    pass


class OverlapViolation(PlanarReachError):
    pass


class BlockCapExceeded(PlanarReachError):
    pass


# switch_on / reductions / inc_tc
class NotSimple(PlanarReachError):
    pass


class AlreadyOn(PlanarReachError):
    pass


class UnknownEdge(PlanarReachError):
    pass


class UnknownVertex(PlanarReachError):
    pass


class AlreadyDeleted(PlanarReachError):
    pass


class AlreadyContracted(PlanarReachError):
    pass


# cli / instance IO
class BadParams(PlanarReachError):
    pass


class ParseError(PlanarReachError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
