"""
Trajectory - per-step reports of one integration
"""

from dataclasses import dataclass, field

import numpy as np

from core.model import State, SystemModel


@dataclass(frozen=True)
class StepReport:
    """
    Diagnostics of one converged step, or of the initial record.

    work_ext, diss_f and diss_s are increments over the step, so that
    kinetic + potential changes by work_ext - diss_f - diss_s.
    """
    state: State
    iters: int
    residual_norm: float
    kinetic: float
    potential: float
    work_ext: float = 0.0
    diss_f: float = 0.0
    diss_s: float = 0.0
    degenerate_fallback: bool = False

    @property
    def energy(self) -> float:
        return self.kinetic + self.potential

    @property
    def t(self) -> float:
        return self.state.t

    @classmethod
    def initial(cls, system: SystemModel, state: State) -> "StepReport":
        return cls(
            state=state,
            iters=0,
            residual_norm=0.0,
            kinetic=system.kinetic_energy(state.s),
            potential=system.potential(state.q),
        )


@dataclass
class Trajectory:
    """Initial record followed by one report per step on a uniform grid"""
    dt: float
    records: list[StepReport] = field(default_factory=list)
    # Steps whose final force evaluation hit a degenerate denominator
    degenerate_steps: int = 0

    @property
    def initial(self) -> StepReport:
        return self.records[0]

    @property
    def final(self) -> StepReport:
        return self.records[-1]

    @property
    def reports(self) -> list[StepReport]:
        """Step reports without the initial record"""
        return self.records[1:]

    @property
    def n_steps(self) -> int:
        return len(self.records) - 1

    @property
    def t0(self) -> float:
        return self.initial.t

    def __len__(self) -> int:
        return len(self.records)

    # ==================== Column accessors ====================

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def positions(self) -> np.ndarray:
        return np.array([r.state.q for r in self.records])

    def velocities(self) -> np.ndarray:
        return np.array([r.state.s for r in self.records])

    def stacked(self) -> np.ndarray:
        """Phase-space vectors (q, s), one row per record"""
        return np.array([r.state.stacked() for r in self.records])

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def iterations(self) -> np.ndarray:
        return np.array([r.iters for r in self.records[1:]], dtype=int)

    def max_energy_drift(self) -> float:
        """max_n |E_n - E_0|"""
        energies = self.energies()
        return float(np.max(np.abs(energies - energies[0])))

    def mean_iterations(self) -> float:
        iters = self.iterations()
        return float(iters.mean()) if iters.size else 0.0

    def total_dissipation(self) -> float:
        """Sum of force and velocity dissipation over all steps"""
        return float(sum(r.diss_f + r.diss_s for r in self.reports))
