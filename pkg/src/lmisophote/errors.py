"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for geometric precondition failures."""


class NotTimelike(GeometryError):
    pass


class NotSameTimecone(GeometryError):
    pass


class WrongCausalTypes(GeometryError):
    pass


class TooFewPoints(GeometryError):
    pass


class NonSpacelikeChord(GeometryError):
    pass


class DegenerateCurvature(GeometryError):
    pass


class NullPrincipalNormal(GeometryError):
    pass


class MixedCurveKind(GeometryError):
    """Principal normal changes causal character along the analysed segment."""


class DegenerateJacobian(GeometryError):
    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


class NotTimelikeNormal(GeometryError):
    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


class FrameDegenerate(GeometryError):
    pass


class OffSurface(GeometryError):
    pass


class UnknownSurface(GeometryError):
    pass


class BadParams(GeometryError):
    pass


class SilhouetteUndefined(GeometryError):
    pass


class DegenerateNormalCurvature(GeometryError):
    pass


class NotAnIsophote(GeometryError):
    pass


class InfeasibleAngle(NotAnIsophote):
    """Mean of psi/omega lies on the wrong side of 1 for the requested axis kind."""


class DenominatorVanishes(GeometryError):
    pass


class ExprError(ValueError):
    """Base class for surface-expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, msg, offset, expected=None):
        detail = f"{msg} at offset {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class UnknownIdentifier(ExprError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class ExprDomainError(ExprError):
    pass
