"""Exception hierarchy shared by every module."""


class KGraphError(Exception):
    """Base class for all errors raised by the package."""


class ParseError(KGraphError, ValueError):
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class ValidationError(KGraphError, ValueError):
    pass


class MissingRule(ValidationError):
    pass


class NonBijectiveRule(ValidationError):
    pass


class EndpointMismatch(ValidationError):
    pass


class CubeConditionFailure(ValidationError):
    def __init__(self, message, path=None):
        self.path = path
        super().__init__(message)


class DegreeOutOfRange(KGraphError, ValueError):
    pass


class RangeMismatch(KGraphError, ValueError):
    pass


class InfiniteDegreeUnsupportedHere(KGraphError, ValueError):
    pass


class DegreeExceeded(KGraphError, ValueError):
    pass


class NotABoundaryPath(KGraphError, ValueError):
    def __init__(self, message, n=None, exhaustive_set=None):
        self.n = n
        self.exhaustive_set = exhaustive_set
        super().__init__(message)


class ExhaustiveG(KGraphError, ValueError):
    pass


class NotComposable(KGraphError, ValueError):
    pass


class NotAnArrow(KGraphError, ValueError):
    pass


class InjectivityUnverifiable(KGraphError):
    pass


class ImageMismatch(KGraphError, ValueError):
    pass


class RelationFailure(KGraphError):
    def __init__(self, relation, witness):
        self.relation = relation
        self.witness = witness
        super().__init__(f"{relation} fails at {witness}")


class GraphMismatch(KGraphError, ValueError):
    pass


class RingMismatch(KGraphError, ValueError):
    pass


class CoverGap(KGraphError, LookupError):
    pass


class WitnessDisagreement(KGraphError):
    pass


class PartitionNotStabilized(KGraphError):
    pass


class RankMismatch(KGraphError, ValueError):
    pass


class SkeletonMismatch(KGraphError, ValueError):
    pass


class RankUnsupported(KGraphError, ValueError):
    pass


class NotBijective(KGraphError, ValueError):
    pass


class HypothesesViolated(KGraphError, ValueError):
    pass


class WindowInconsistency(KGraphError, ValueError):
    pass


class EquivalenceClassMismatch(KGraphError, ValueError):
    pass


class UnknownCommand(KGraphError, ValueError):
    pass
