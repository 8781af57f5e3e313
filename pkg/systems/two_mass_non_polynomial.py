"""
Two-Mass Non-Polynomial - softening oscillator with a rational potential

    V(q) = 1/2 [V2_ab + VN_ab / (1 + VD_cd q^c q^d)^n] q^a q^b

with symmetric V2, VN and a positive semi-definite VD.
"""

import numpy as np

from core.dgrad import DissipationCase, DissipationConfig
from core.integrator import SolverConfig
from core.linalg import SymMat, Vec, as_symmat, is_psd
from core.model import State, SystemModel
from core.systems import SystemSetup

# Example 2 parameters
EXAMPLE2_V2 = np.array([[10.0, 0.0], [0.0, 10.0]])
EXAMPLE2_VN = 300.0 * np.array([[1.0, -1.0], [-1.0, 1.0]])
EXAMPLE2_VD = 5.0 * np.array([[1.0, -1.0], [-1.0, 1.0]])
EXAMPLE2_EXPONENT = 3
EXAMPLE2_Q0 = (-0.41726, -0.49840)
EXAMPLE2_S0 = (-2.53182, -2.79761)
EXAMPLE2_DT = 1e-4
EXAMPLE2_DURATION = 50.0
EXAMPLE2_CHI_F = 0.001
EXAMPLE2_CHI_S = 0.001


class TwoMassNonPolynomial(SystemModel):
    """Quadratic form whose stiffness softens with the VD-weighted amplitude"""

    name = "two_mass_non_polynomial"
    kind = "example2"
    description = "Two-mass oscillator with non-polynomial potential"

    def __init__(self, mass: SymMat, V2: SymMat, VN: SymMat, VD: SymMat, n_exp: int = 3):
        super().__init__(mass)
        n = self.dim
        self.V2 = as_symmat(V2, dim=n)
        self.VN = as_symmat(VN, dim=n)
        self.VD = as_symmat(VD, dim=n)
        if not is_psd(self.VD):
            raise ValueError("VD must be positive semi-definite")
        if int(n_exp) < 0:
            raise ValueError(f"Exponent must be non-negative, got {n_exp}")
        self.n_exp = int(n_exp)
        for array in (self.V2, self.VN, self.VD):
            array.setflags(write=False)

    def _softening(self, q: Vec) -> float:
        return 1.0 + float(q @ self.VD @ q)

    def potential(self, q: Vec) -> float:
        w = self._softening(q)
        return 0.5 * float(q @ self.V2 @ q) + 0.5 * float(q @ self.VN @ q) * w ** -self.n_exp

    def grad_potential(self, q: Vec) -> Vec:
        n = self.n_exp
        w = self._softening(q)
        a = float(q @ self.VN @ q)
        return self.V2 @ q + w ** -n * (self.VN @ q) - n * a * w ** (-n - 1) * (self.VD @ q)

    def analytic_hessian(self, q: Vec) -> SymMat:
        n = self.n_exp
        w = self._softening(q)
        a = float(q @ self.VN @ q)
        vn_q, vd_q = self.VN @ q, self.VD @ q
        cross = np.outer(vn_q, vd_q)
        return (
            self.V2
            + w ** -n * self.VN
            - 2.0 * n * w ** (-n - 1) * (cross + cross.T)
            + 2.0 * n * (n + 1) * a * w ** (-n - 2) * np.outer(vd_q, vd_q)
            - n * a * w ** (-n - 1) * self.VD
        )

    def sample_point(self, rng: np.random.Generator) -> Vec:
        # Amplitudes of the reference run
        return rng.uniform(-1.0, 1.0, size=self.dim)

    @classmethod
    def from_config(cls, params: dict, rng: np.random.Generator) -> SystemSetup:
        setup = make_example2(vn_scale=float(params.get("vn_scale", 1.0)))
        return setup.with_initial_overrides(params)


def make_example2(case: "DissipationCase | str" = DissipationCase.FULL, vn_scale: float = 1.0) -> SystemSetup:
    """
    Softening demonstrator: M = I, V2 = 10 I, VN = 300 [[1, -1], [-1, 1]],
    VD = 5 [[1, -1], [-1, 1]], n = 3.

    vn_scale multiplies VN; 0 leaves the linear oscillator with stiffness V2.
    The dissipation preset is chi_f = chi_s = 0.001 with D = V2.
    """
    system = TwoMassNonPolynomial(
        mass=np.eye(2),
        V2=EXAMPLE2_V2,
        VN=vn_scale * EXAMPLE2_VN,
        VD=EXAMPLE2_VD,
        n_exp=EXAMPLE2_EXPONENT,
    )
    preset = DissipationConfig(chi_f=EXAMPLE2_CHI_F, chi_s=EXAMPLE2_CHI_S, D=EXAMPLE2_V2, h=EXAMPLE2_DT)
    return SystemSetup(
        system=system,
        initial=State(q=np.array(EXAMPLE2_Q0), s=np.array(EXAMPLE2_S0)),
        solver=SolverConfig(dt=EXAMPLE2_DT),
        dissipation=DissipationCase(case).apply(preset),
        duration=EXAMPLE2_DURATION,
    )
