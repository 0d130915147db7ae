"""Exception types raised by the numerical group machinery."""


class AffineCertError(Exception):
    """Base class for all errors raised by this package."""


class DimMismatch(AffineCertError):
    """Operands live in different ambient dimensions."""


class SingularMatrix(AffineCertError):
    """A matrix that must be invertible is numerically singular."""


class AmbiguousModulus(AffineCertError):
    """Eigenvalue moduli cannot be split unambiguously at the threshold."""


class ZeroVector(AffineCertError):
    """A projective point was given a (numerically) zero representative."""


class EmptySubspace(AffineCertError):
    """A subspace operation needs a nontrivial subspace."""


class UnitEigenvalue(AffineCertError):
    """The linear part has 1 as an eigenvalue, so no unique fixed point exists."""


class NoUnitEigenvalue(AffineCertError):
    """The linear part has no eigenvalue 1, so no invariant line exists.

    Carries the unique fixed point as evidence.
    """

    def __init__(self, message, fixed_point=None):
        super().__init__(message)
        self.fixed_point = fixed_point


class NonSemisimpleNeutral(AffineCertError):
    """ker(l(g)-I) and im(l(g)-I) fail to complement each other."""


class NotHyperbolic(AffineCertError):
    """An element required to be hyperbolic is not."""


class NotTransversal(AffineCertError):
    """A pair of elements required to be transversal is not."""


class NotContracting(AffineCertError):
    """No power of the element can become hyperbolic."""


class PowerOverflow(AffineCertError):
    """The power needed would exceed the hard budget."""


class NotMaximalIsotropic(AffineCertError):
    """The given subspace is not maximal isotropic for the form."""


class NotIsotropic(AffineCertError):
    """The form does not vanish on the given subspace."""


class EqualSubspaces(AffineCertError):
    """Two subspaces required to be distinct coincide."""


class DegenerateProjection(AffineCertError):
    """A reference projection restricted to the subspace is singular."""


class NotIsometry(AffineCertError):
    """The linear part does not preserve the quadratic form."""


class NotRRegular(AffineCertError):
    """The element does not have the minimal neutral dimension."""


class NeutralDimWrong(AffineCertError):
    """The neutral space has the wrong dimension for the product sign."""


class NotProductCompatible(AffineCertError):
    """The element cannot be aligned with the 3+3 product splitting."""


class BallTooLarge(AffineCertError):
    """Word enumeration was asked for a ball beyond the hard cap."""


class NoVerifiedN(AffineCertError):
    """No exponent up to the budget passed the ball-intersection check."""


class BudgetExhausted(AffineCertError):
    """A search ran out of budget before meeting its target."""


class UnknownDescriptor(AffineCertError):
    """The classification table has no entry for the descriptor."""


class GroupFileError(AffineCertError):
    """A group file failed to parse; carries line/column information."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
