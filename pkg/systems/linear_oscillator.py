"""
Linear Oscillator - V = 1/2 q^T K q with a closed-form solution
"""

import numpy as np
import scipy.linalg as la

from core.linalg import SymMat, Vec, as_symmat, as_vec
from core.model import State, SystemModel
from core.systems import SystemSetup


class LinearOscillator(SystemModel):
    """Coupled linear oscillator; the reference for exact-solution error studies"""

    name = "linear_oscillator"
    kind = "linear_oscillator"
    description = "Linear oscillator"
    has_exact_solution = True

    def __init__(self, mass: SymMat, stiffness: SymMat):
        super().__init__(mass)
        self.K = as_symmat(stiffness, dim=self.dim, require_spd=True)
        self.K.setflags(write=False)
        # Generalized eigenproblem K phi = omega^2 M phi, with Phi^T M Phi = I
        omega_sq, modes = la.eigh(self.K, self.mass())
        self._omega = np.sqrt(omega_sq)
        self._modes = modes

    @property
    def frequencies(self) -> np.ndarray:
        """Angular eigenfrequencies (rad/s)"""
        return self._omega.copy()

    def potential(self, q: Vec) -> float:
        return 0.5 * float(q @ self.K @ q)

    def grad_potential(self, q: Vec) -> Vec:
        return self.K @ q

    def analytic_hessian(self, q: Vec) -> SymMat:
        return self.K

    def exact_solution(self, initial: State, t: float) -> State:
        """State at time t of the motion starting from `initial`"""
        tau = t - initial.t
        M = self.mass()
        eta0 = self._modes.T @ M @ initial.q
        eta_dot0 = self._modes.T @ M @ initial.s
        cos, sin = np.cos(self._omega * tau), np.sin(self._omega * tau)
        eta = eta0 * cos + eta_dot0 / self._omega * sin
        eta_dot = -eta0 * self._omega * sin + eta_dot0 * cos
        return State(q=self._modes @ eta, s=self._modes @ eta_dot, t=t)

    @classmethod
    def from_config(cls, params: dict, rng: np.random.Generator) -> SystemSetup:
        return make_linear_oscillator(
            mass=params.get("M", 1.0),
            stiffness=params.get("K", 1.0),
            q0=params.get("q0"),
            s0=params.get("s0"),
        )


def make_linear_oscillator(mass=1.0, stiffness=1.0, q0=None, s0=None) -> SystemSetup:
    """
    Oscillator with mass and stiffness matrices (scalars give one degree of
    freedom). Defaults to unit mass and stiffness, q0 = 1, s0 = 0.
    """
    system = LinearOscillator(mass=mass, stiffness=stiffness)
    n = system.dim
    q0 = np.ones(n) if q0 is None else as_vec(q0, dim=n)
    s0 = np.zeros(n) if s0 is None else as_vec(s0, dim=n)
    return SystemSetup(system=system, initial=State(q=q0, s=s0))
