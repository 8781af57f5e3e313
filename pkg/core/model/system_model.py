"""
System Model - Abstract class that all mechanical systems must implement
Systems are plugins that:
1. Own a constant mass matrix and a potential with its gradient
2. Optionally expose symmetry data (invariants, reduced potential)
3. Know nothing about time stepping or discrete derivatives

Sign convention: grad_potential returns g(q) = +dV/dq. Every discrete
formula in core.dgrad is written in terms of g, so that the discrete force
satisfies <f, y - x> = V(y) - V(x) and enters the residual with a plus sign.
"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

import numpy as np

from core.errors import DimensionMismatchError, MissingSymmetryDataError
from core.linalg import SymMat, Vec, as_symmat

if TYPE_CHECKING:
    from core.systems.system_setup import SystemSetup


class SystemModel(ABC):
    """
    Abstract base class for all mechanical systems.

    All systems must:
    1. Inherit from this class
    2. Implement potential() and grad_potential()
    3. Pass a constant SPD mass matrix to __init__

    Systems should NOT:
    1. Mutate their parameters after construction
    2. Depend on the integrator or on the scheme in use
    """

    # System name (used in logs)
    name: str = "base_system"

    # Tag selecting this system in run configurations; None keeps it out of the registry
    kind: Optional[str] = None

    # Description for logging
    description: str = "Base system"

    # Capability flags, overridden by subclasses
    has_symmetry: bool = False
    is_particle_system: bool = False
    has_exact_solution: bool = False

    def __init__(self, mass: SymMat):
        mass = as_symmat(mass, require_spd=True)
        mass.setflags(write=False)
        self._mass = mass

    @property
    def dim(self) -> int:
        return self._mass.shape[0]

    def mass(self) -> SymMat:
        """Constant mass matrix M"""
        return self._mass

    @abstractmethod
    def potential(self, q: Vec) -> float:
        """Potential energy V(q)"""
        pass

    @abstractmethod
    def grad_potential(self, q: Vec) -> Vec:
        """Gradient g(q) = dV/dq"""
        pass

    def external_force(self, q: Vec, t: float) -> Vec:
        """External load; identically zero unless overridden"""
        return np.zeros(self.dim)

    def load_end_time(self) -> float:
        """Time after which external_force vanishes"""
        return 0.0

    def kinetic_energy(self, s: Vec) -> float:
        return 0.5 * float(s @ self._mass @ s)

    def analytic_hessian(self, q: Vec) -> Optional[SymMat]:
        """Hessian of V, or None when the system has no closed form"""
        return None

    def sample_point(self, rng: np.random.Generator) -> Vec:
        """Random configuration used by validation and property tests"""
        return rng.normal(size=self.dim)

    @classmethod
    def from_config(cls, params: dict, rng: np.random.Generator) -> "SystemSetup":
        """Build the system and its initial state from the `system` block of a run description"""
        raise NotImplementedError(f"{cls.__name__} cannot be built from a run description")

    # ==================== Symmetry (optional) ====================

    def invariant_map(self, q: Vec) -> Vec:
        """Invariants Pi(q)"""
        raise MissingSymmetryDataError(f"{self.name} provides no invariant map")

    def invariant_jacobian(self, q: Vec) -> np.ndarray:
        """Jacobian DPi(q), one row per invariant"""
        raise MissingSymmetryDataError(f"{self.name} provides no invariant Jacobian")

    def reduced_potential(self, pi: Vec) -> float:
        """Reduced potential with V = V_reduced(Pi(q))"""
        raise MissingSymmetryDataError(f"{self.name} provides no reduced potential")

    def reduced_grad(self, pi: Vec) -> Vec:
        """Gradient of the reduced potential with respect to the invariants"""
        raise MissingSymmetryDataError(f"{self.name} provides no reduced gradient")

    def reduced_dissipation_matrix(self) -> SymMat:
        """Default dissipation weight in invariant space"""
        raise MissingSymmetryDataError(f"{self.name} provides no invariant-space dissipation matrix")

    # ==================== Generators (particle systems) ====================

    @property
    def n_particles(self) -> int:
        if not self.is_particle_system:
            return 0
        return self.dim // 3

    def translation_generator(self, a: Vec, q: Vec) -> Vec:
        """tau_a(q): the n-fold stack of a"""
        self._require_particles()
        return np.tile(np.asarray(a, dtype=float), self.n_particles)

    def rotation_generator(self, theta: Vec, q: Vec) -> Vec:
        """rho_theta(q): the stack of theta x q_i"""
        self._require_particles()
        positions = np.asarray(q, dtype=float).reshape(-1, 3)
        return np.cross(np.asarray(theta, dtype=float), positions).ravel()

    def _require_particles(self):
        if not self.is_particle_system or self.dim % 3 != 0:
            raise DimensionMismatchError(f"{self.name} is not a particle system in R^3n")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"
