"""Exception hierarchy shared by all modules."""


class StarprocError(Exception):
    """Base class for every error raised by this package."""


class ParseError(StarprocError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class AlphabetError(StarprocError, ValueError):
    pass


class VertexCapExceeded(StarprocError, RuntimeError):
    pass


class ChartError(StarprocError, ValueError):
    """Malformed chart document or inconsistent chart structure."""


class UnknownVertex(StarprocError, KeyError):
    def __str__(self):
        return f"unknown vertex {self.args[0]!r}"


class InvalidWitness(StarprocError, ValueError):
    pass


class UnguardedWitness(StarprocError, ValueError):
    pass


class PartialMapGap(StarprocError, ValueError):
    pass


class NotASolution(StarprocError, ValueError):
    pass


class ProofError(StarprocError, ValueError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(str(p) for p in self.path) or "<root>"
        super().__init__(f"{message} (at {where})")


class GuardViolation(ProofError):
    pass


class RSPNotAllowed(ProofError):
    pass


class TransformError(StarprocError, ValueError):
    pass


class NotBisimilarVertices(TransformError):
    pass


class PreconditionUnmet(TransformError):
    pass


class NoBisimilarTarget(TransformError):
    pass


class AmbiguousCounterpart(TransformError):
    pass


class NotALocalTransfer(TransformError):
    pass


class CrystallizationFailed(StarprocError, AssertionError):
    pass
