"""Exception hierarchy shared by every module.

Each class carries an ``exit_code`` so the command line front end can map
failures onto its exit-code contract without inspecting messages.
"""


class QuadError(Exception):
    exit_code = 1


class ExprError(QuadError, ValueError):
    exit_code = 2


class ExprSyntaxError(ExprError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(ExprError):
    def __init__(self, name):
        super().__init__(f"unknown identifier {name!r}")
        self.name = name


class DimensionError(ExprError):
    def __init__(self, variable, dim):
        super().__init__(f"variable {variable!r} is not defined in {dim}-D")
        self.variable = variable


class GeometryError(QuadError):
    """Mesh or element configuration the method cannot handle; refine n."""

    exit_code = 3


class AmbiguousSigns(GeometryError):
    pass


class DisplacementFailed(GeometryError):
    pass


class MeshValidationError(GeometryError):
    def __init__(self, report):
        super().__init__(
            "mesh validation failed "
            f"(min clearance ratio {report.min_clearance_ratio:.3g}, "
            f"max sign changes per edge {report.max_sign_changes_per_edge}); increase n"
        )
        self.report = report


class NumericalError(QuadError):
    exit_code = 4


class NoSignChange(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass


class EvalDomainError(NumericalError):
    pass


class OrderOutOfRange(QuadError, ValueError):
    exit_code = 2


class EmptyStudy(QuadError, ValueError):
    exit_code = 2
