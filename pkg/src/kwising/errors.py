"""Exception hierarchy shared by all modules."""


class KacWardError(Exception):
    """Base class for every error raised by kwising."""


class GraphError(KacWardError, ValueError):
    pass


class CrossingEdges(GraphError):
    def __init__(self, first, second):
        super().__init__(f"edges {first} and {second} cross")
        self.edges = (first, second)


class NotSimple(GraphError):
    pass


class DanglingEdge(GraphError):
    pass


class IsolatedVertex(GraphError):
    pass


class InvalidFace(GraphError):
    pass


class UnknownFace(GraphError, KeyError):
    pass


class UnknownVertex(GraphError, KeyError):
    pass


class DegenerateEdge(GraphError):
    pass


class EmptyInterior(KacWardError):
    pass


class MissingWeight(KacWardError, KeyError):
    pass


class ZeroWeight(KacWardError, ValueError):
    pass


class NoConvergence(KacWardError, ArithmeticError):
    pass


class TooLarge(KacWardError, ValueError):
    pass


class InvalidBeta(KacWardError, ValueError):
    pass


class NotInRegime(KacWardError):
    pass


class BranchFailure(KacWardError, ArithmeticError):
    pass


class NotContractive(KacWardError):
    pass


class NotRhombic(GraphError):
    pass


class AngleOutOfBounds(GraphError):
    pass


class FormatError(KacWardError, ValueError):
    """Malformed input file."""
