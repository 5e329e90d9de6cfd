"""Exception hierarchy.

Input problems (bad files, shapes, arguments) derive from :class:`InputError`;
failures of the numerics derive from :class:`NumericalError`.  The CLI maps
the two families to exit codes 1 and 2.
"""


class GSPError(Exception):
    """Base class for every error raised by this package."""


class InputError(GSPError, ValueError):
    pass


class ParseError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class BadDimension(InputError):
    """Subspace dimension ``p`` outside ``1..n-1``."""


class NumericalError(GSPError, ArithmeticError):
    pass


class SingularMatrix(NumericalError):
    pass


class IrregularPencil(NumericalError):
    pass


class OrderingUnmatchable(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class ZeroOverlap(NumericalError):
    pass


class DefectivePencil(NumericalError):
    pass


class NearSingularL(NumericalError):
    pass


class MissingPerturbedFactors(InputError):
    pass


class ZeroPair(NumericalError):
    """Eigenvalue pair ``<0, 0>``, for which the chordal metric is undefined."""


class InvalidChordalBound(NumericalError):
    """The radicand of the chordal eigenvalue bound is not positive."""


class ZeroDiagonal(NumericalError):
    """A diagonal entry of T or R vanishes (eigenvalue 0 or infinity)."""


class ZeroEigenvalue(NumericalError):
    pass


class DegenerateProjection(NumericalError):
    pass


class SingularH(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class DivergenceDetected(NumericalError):
    pass


class SingularS(NumericalError):
    pass
