"""
Two-Mass Polynomial - reduced-order oscillator with a quartic potential

    V(q) = 1/2 V2_ab q^a q^b + 1/3 V3_abc q^a q^b q^c + 1/4 V4_abcd q^a q^b q^c q^d
"""

from itertools import permutations
from math import factorial
from typing import Optional

import numpy as np

from core.dgrad import DissipationCase, DissipationConfig
from core.integrator import SolverConfig
from core.linalg import SymMat, Vec, as_symmat
from core.model import State, SystemModel
from core.systems import SystemSetup

# Example 1 parameters
EXAMPLE1_V2 = np.array([[16.0, -15.0], [-15.0, 16.0]])
EXAMPLE1_V4_1111 = 15.0
EXAMPLE1_Q0 = (1.0, 0.918)
EXAMPLE1_S0 = (0.0, 0.0)
EXAMPLE1_DT = 1e-3
EXAMPLE1_DURATION = 50.0
EXAMPLE1_CHI_F = 0.0025
EXAMPLE1_CHI_S = 0.008


def symmetrize(tensor: np.ndarray) -> np.ndarray:
    """Average a coefficient tensor over all index permutations"""
    total = sum(np.transpose(tensor, p) for p in permutations(range(tensor.ndim)))
    return total / factorial(tensor.ndim)


class TwoMassPolynomial(SystemModel):
    """Polynomial potential of degree four in n generalized coordinates"""

    name = "two_mass_polynomial"
    kind = "example1"
    description = "Two-mass oscillator with polynomial potential"

    def __init__(
        self,
        mass: SymMat,
        V2: SymMat,
        V3: Optional[np.ndarray] = None,
        V4: Optional[np.ndarray] = None,
    ):
        super().__init__(mass)
        n = self.dim
        self.V2 = as_symmat(V2, dim=n)
        self.V3 = symmetrize(np.zeros((n,) * 3) if V3 is None else np.asarray(V3, dtype=float))
        self.V4 = symmetrize(np.zeros((n,) * 4) if V4 is None else np.asarray(V4, dtype=float))
        if self.V3.shape != (n,) * 3 or self.V4.shape != (n,) * 4:
            raise ValueError(f"Coefficient tensors must have shapes {(n,) * 3} and {(n,) * 4}")
        for array in (self.V2, self.V3, self.V4):
            array.setflags(write=False)

    def potential(self, q: Vec) -> float:
        quadratic = 0.5 * float(q @ self.V2 @ q)
        cubic = float(np.einsum("abc,a,b,c->", self.V3, q, q, q)) / 3.0
        quartic = float(np.einsum("abcd,a,b,c,d->", self.V4, q, q, q, q)) / 4.0
        return quadratic + cubic + quartic

    def grad_potential(self, q: Vec) -> Vec:
        return (
            self.V2 @ q
            + np.einsum("abc,b,c->a", self.V3, q, q)
            + np.einsum("abcd,b,c,d->a", self.V4, q, q, q)
        )

    def analytic_hessian(self, q: Vec) -> SymMat:
        return (
            self.V2
            + 2.0 * np.einsum("abc,c->ab", self.V3, q)
            + 3.0 * np.einsum("abcd,c,d->ab", self.V4, q, q)
        )

    @classmethod
    def from_config(cls, params: dict, rng: np.random.Generator) -> SystemSetup:
        setup = make_example1()
        return setup.with_initial_overrides(params)


def make_example1(case: "DissipationCase | str" = DissipationCase.FULL) -> SystemSetup:
    """
    Two-mass demonstrator: M = I, V2 = [[16, -15], [-15, 16]], V4_1111 = 15.

    The dissipation preset is chi_f = 0.0025, chi_s = 0.008 with D = V2,
    reduced to the mechanisms selected by `case`.
    """
    V4 = np.zeros((2, 2, 2, 2))
    V4[0, 0, 0, 0] = EXAMPLE1_V4_1111
    system = TwoMassPolynomial(mass=np.eye(2), V2=EXAMPLE1_V2, V4=V4)
    preset = DissipationConfig(chi_f=EXAMPLE1_CHI_F, chi_s=EXAMPLE1_CHI_S, D=EXAMPLE1_V2, h=EXAMPLE1_DT)
    return SystemSetup(
        system=system,
        initial=State(q=np.array(EXAMPLE1_Q0), s=np.array(EXAMPLE1_S0)),
        solver=SolverConfig(dt=EXAMPLE1_DT),
        dissipation=DissipationCase(case).apply(preset),
        duration=EXAMPLE1_DURATION,
    )

