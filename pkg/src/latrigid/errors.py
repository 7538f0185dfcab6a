"""Exception types shared by the modules."""


class LatRigidError(Exception):
    """Base class."""


class DuplicatePoint(LatRigidError, ValueError):
    pass


class InvalidPlacement(LatRigidError, ValueError):
    pass


class DegenerateAngle(LatRigidError, ValueError):
    pass


class OutOfPerturbationBall(LatRigidError):
    pass


class NotConnected(LatRigidError):
    pass


class InvalidWitness(LatRigidError):
    pass


class BridgeOnBoundary(LatRigidError):
    pass


class NotSimple(LatRigidError):
    pass


class NoBracket(LatRigidError):
    pass


class DegenerateGeometry(LatRigidError):
    pass


class WitnessInvalid(LatRigidError):
    pass


class InvalidRegion(LatRigidError):
    pass


class BudgetExhausted(LatRigidError):
    pass


class NoDeformationAvailable(LatRigidError):
    pass


class ParseError(LatRigidError, ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
