"""
Exception hierarchy shared by all gdr modules
"""

from typing import Optional


class GdrError(Exception):
    """Base class for every error raised by gdr"""


# ==================== linalg ====================

class NotSPDError(GdrError):
    """Cholesky factorization met a non-positive pivot"""


class SingularMatrixError(GdrError):
    """LU factorization met a pivot below tolerance"""


class DimensionMismatchError(GdrError):
    """Operand shapes do not agree"""


# ==================== model / systems ====================

class BadTopologyError(GdrError):
    """A spring references a particle that does not exist"""


class SpringCollapseError(GdrError):
    """Two particles joined by a spring with positive rest length coincide"""


class MissingSymmetryDataError(GdrError):
    """The system does not provide the invariant map needed by the G-equivariant force"""


# ==================== dgrad ====================

class DegenerateDenominatorError(GdrError):
    """The correction denominator vanished under the Strict degeneracy policy"""

    def __init__(self, denominator: float, scale: float):
        super().__init__(
            f"Degenerate denominator {denominator:.3e} (scale {scale:.3e})"
        )
        self.denominator = denominator
        self.scale = scale


# ==================== integrator ====================

class NewtonDivergedError(GdrError):
    """Newton-Raphson did not reach the tolerance within max_iters"""

    def __init__(self, step_index: int, residual_norm: float, iters: int = 0):
        super().__init__(
            f"Newton diverged at step {step_index}: "
            f"residual {residual_norm:.3e} after {iters} iterations"
        )
        self.step_index = step_index
        self.residual_norm = residual_norm
        self.iters = iters


class SingularJacobianError(GdrError):
    """The Newton Jacobian could not be factorized"""

    def __init__(self, step_index: int, message: str = ""):
        super().__init__(f"Singular Jacobian at step {step_index}: {message}")
        self.step_index = step_index


class TimeGridError(GdrError):
    """The requested interval is not an integer number of steps"""


# ==================== diagnostics ====================

class GridMisalignedError(GdrError):
    """A requested sample time is not on the common grid of the resolutions"""


# ==================== cli ====================

class SchemaError(GdrError):
    """Run description failed validation"""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path
        self.message = message

    @classmethod
    def at(cls, parts: "Optional[list]", message: str) -> "SchemaError":
        path = ".".join(str(p) for p in (parts or []))
        return cls(path, message)
