"""Exception hierarchy shared by every subsystem."""


class DiracheckError(Exception):
    """Base class for all engine errors."""


class ZeroDenominator(DiracheckError):
    pass


class PoleAtPoint(DiracheckError):
    pass


class PoleAtSample(DiracheckError):
    pass


class PatchMismatch(DiracheckError):
    pass


class DegreeZero(DiracheckError):
    pass


class WrongDegree(DiracheckError):
    pass


class ShapeMismatch(DiracheckError):
    pass


class NotSkew(DiracheckError):
    pass


class NotClosed(DiracheckError):
    pass


class NotSmoothSubbundle(DiracheckError):
    pass


class NotInOrbitDirection(DiracheckError):
    pass


class EndpointMismatch(DiracheckError):
    pass


class PrerequisiteFailed(DiracheckError):
    pass


class SquareDoesNotCommute(DiracheckError):
    pass


class OuterSquareFails(DiracheckError):
    pass


class GaugeEquationFails(DiracheckError):
    pass


class CocycleFails(DiracheckError):
    pass


class OverlapMismatch(DiracheckError):
    pass


class NotBasic(DiracheckError):
    pass


class NoSolution(DiracheckError):
    pass


class NonUnique(DiracheckError):
    pass


class NotTransverse(DiracheckError):
    pass


class FrameDoesNotSpan(DiracheckError):
    pass


class SceneError(DiracheckError):
    """Scene-file rejection with a source position."""

    def __init__(self, message, line=None, col=None):
        super().__init__(message)
        self.line = line
        self.col = col

    def __str__(self):
        base = super().__str__()
        if self.line is not None:
            return f"{self.line}:{self.col}: {base}"
        return base


class SceneSyntaxError(SceneError):
    pass


class DuplicateName(SceneError):
    pass


class UnknownReference(SceneError):
    pass
