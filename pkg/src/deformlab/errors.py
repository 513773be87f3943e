"""Exception hierarchy. Every validation failure names a witness where one exists."""

from __future__ import annotations


class DeformlabError(Exception):
    """Base class for all errors raised by this package."""


class NotAGroup(DeformlabError):
    """A Cayley table violates a group axiom.

    ``axiom`` is one of "range", "latin-square", "identity", "inverse",
    "associativity"; ``witness`` pins down the offending entry or triple.
    """

    def __init__(self, axiom: str, witness=None):
        self.axiom = axiom
        self.witness = witness
        detail = f" at {witness}" if witness is not None else ""
        super().__init__(f"not a group: {axiom} fails{detail}")


class InfiniteGroupUnsupported(DeformlabError):
    """Operation needs full matrices on l2 of the group; only finite groups qualify."""


class DimensionMismatch(DeformlabError):
    pass


class GroupMismatch(DeformlabError):
    pass


class CocycleMismatch(DeformlabError):
    pass


class NotSkewSymmetric(DeformlabError):
    pass


class NoSolution(DeformlabError):
    """Coboundary equation has no solution within tolerance (input not a valid cocycle)."""

    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(f"coboundary residual {residual:.3e} exceeds {tolerance:.1e}")


class NotCohomologous(DeformlabError):
    pass


class BundleInvalid(DeformlabError):
    """Base for Fell-bundle validation failures; carries a witness and residual."""

    def __init__(self, message: str, witness=None, residual: float | None = None):
        self.witness = witness
        self.residual = residual
        extra = ""
        if witness is not None:
            extra += f" witness={witness}"
        if residual is not None:
            extra += f" residual={residual:.3e}"
        super().__init__(message + extra)


class NotStarClosed(BundleInvalid):
    pass


class NotGraded(BundleInvalid):
    pass


class NotUnital(BundleInvalid):
    pass


class DependentBasis(BundleInvalid):
    pass


class NotInAlgebra(DeformlabError):
    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not in the span: residual {residual:.3e} > {tolerance:.1e}"
        )


class NotSemisimpleNumerically(DeformlabError):
    """Eigenvalue clusters of the random central element are ambiguous."""

    def __init__(self, message: str, gaps=None):
        self.gaps = gaps
        super().__init__(message)


class NotAProjection(DeformlabError):
    pass


class NonIntegerPairing(DeformlabError):
    def __init__(self, value: complex):
        self.value = value
        super().__init__(f"graded trace {value} is not within 1e-6 of an integer")


class GapClosed(DeformlabError):
    """Spectral gap of the deforming element fell below threshold; path invalid."""

    def __init__(self, theta: float, gap: float):
        self.theta = theta
        self.gap = gap
        super().__init__(f"spectral gap {gap:.3e} closed at theta={theta}")


class GradingIncompatible(DeformlabError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class WitnessInvalid(DeformlabError):
    pass


class ConfigInvalid(DeformlabError):
    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class InputInvalid(DeformlabError):
    pass
