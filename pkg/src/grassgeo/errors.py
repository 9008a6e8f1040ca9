"""Exception hierarchy shared by every module."""


class GrassgeoError(Exception):
    """Base class for all errors raised by grassgeo."""


class ShapeMismatch(GrassgeoError, ValueError):
    pass


class KernelPole(GrassgeoError, ValueError):
    """A singular value sits on a pole of the scalar kernel."""


class EvaluationFailure(GrassgeoError, RuntimeError):
    """The user-supplied map raised while building a Jacobian."""


class ChartEscape(GrassgeoError, ValueError):
    """The geodesic has left the chart cell (largest angle reached pi/2)."""


class OnPolarDivisor(GrassgeoError, ValueError):
    """The plane has no chart coordinate: it lies on the polar divisor."""


class DiastasisUndefined(GrassgeoError, ValueError):
    pass


class ZeroVector(GrassgeoError, ValueError):
    pass


class OutsideDomain(GrassgeoError, ValueError):
    """Point outside the bounded domain of the noncompact dual."""


class KNotBlockDiagonal(GrassgeoError, ValueError):
    pass


class ZeroTangent(GrassgeoError, ValueError):
    pass


class DegenerateWeights(GrassgeoError, ValueError):
    pass


class TooLarge(GrassgeoError, ValueError):
    pass
