"""Exception types shared across the package."""


class ObstructorError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(ObstructorError, ValueError):
    """Operands live in spaces of different dimensions."""


class AlgebraValidationError(ObstructorError, ValueError):
    """A structure-constant table failed a construction-time check."""


class AssociativityError(AlgebraValidationError):
    """Multiplication table is not associative; ``triple`` names the witnesses."""

    def __init__(self, triple, detail=""):
        self.triple = triple
        msg = f"associativity fails on basis triple {triple}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnitError(AlgebraValidationError):
    """The claimed unit does not act as a two-sided identity."""

    def __init__(self, label, detail=""):
        self.label = label
        msg = f"unit law fails on basis element {label}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class InvolutionError(AlgebraValidationError):
    """The claimed involution is not involutive or not anti-multiplicative."""

    def __init__(self, witnesses, detail=""):
        self.witnesses = witnesses
        msg = f"involution axiom fails on {witnesses}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class GraphValidationError(ObstructorError, ValueError):
    """An obstruction graph violates its shape or base-algebra contract."""


class MapValidationError(ObstructorError, ValueError):
    """A specialization map failed its multiplicativity/injectivity checks."""


class CoverValidationError(ObstructorError, ValueError):
    """A cover datum (iota, pi, degree) is inconsistent."""


class PolynomialError(ObstructorError, ValueError):
    """Base class for multihomogeneous polynomial errors."""


class PolynomialSyntaxError(PolynomialError):
    """Unparseable polynomial text; ``position`` is the 0-based offset."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class InhomogeneousTermError(PolynomialError):
    """A parsed term does not match the polynomial's multidegree."""

    def __init__(self, term, detail=""):
        self.term = term
        msg = f"term {term} breaks multihomogeneity"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
