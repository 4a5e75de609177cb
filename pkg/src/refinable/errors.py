"""Exception hierarchy shared by all modules."""


class RefinableError(ValueError):
    """Base class for every error raised by this package."""


class NotExpanding(RefinableError):
    pass


class SingularMatrix(RefinableError):
    pass


class InternalCountMismatch(RuntimeError):
    """Digit enumeration found a number of cosets different from |det M|."""


class AmbiguousClustering(RefinableError):
    pass


class EmptyResult(RefinableError):
    pass


class BoundOverflow(RefinableError):
    pass


class IrrationalConstraint(RefinableError):
    pass


class SupportEscape(RefinableError):
    """The transition operator maps P_Omega outside of Omega."""


class NotInvariant(RefinableError):
    pass


class NoConvergence(RefinableError):
    pass


class ParityDegenerate(RefinableError):
    pass


class NoDiophantineSolution(RefinableError):
    pass


class BoxTooLarge(RefinableError):
    pass


class SupportCap(RefinableError):
    pass


class PreconditionError(RefinableError):
    pass
