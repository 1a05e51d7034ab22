"""Exception types raised across the package."""


class FsglError(Exception):
    """Base class for all package-specific errors."""


class MissingEdge(FsglError):
    """An operation referenced an edge that is not present in the graph."""


class ConvergenceFailure(FsglError):
    """Iterative eigensolver exceeded its iteration cap without meeting tol."""


class InsufficientEigenpairs(FsglError):
    """Fewer eigenpairs retained than the requested quantity needs."""


class StepTooLarge(FsglError):
    """Weakening step would drive the determinant factor nonpositive."""


class InvalidBudget(FsglError):
    """Extra-edge budget exceeds the number of available node pairs."""


class TooLarge(FsglError):
    """Graph too large for exhaustive subset enumeration."""


class Disconnected(FsglError):
    """Operation requires a connected graph."""


class InvalidDof(FsglError):
    """Degrees of freedom too small for a finite covariance."""


class ZeroReference(FsglError):
    """Reference matrix has zero Frobenius norm."""
