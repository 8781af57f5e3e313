"""
Spring Network - free-flying particles in R^3 joined by linear springs

The potential is written through the quadratic invariants pi_e = |q_i - q_j|^2,

    V(q) = sum_e k_e / 2 (sqrt(pi_e) - L_e)^2,

which makes the network translation and rotation invariant and gives the
G-equivariant force the reduced data it needs.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from core.errors import BadTopologyError, SpringCollapseError
from core.integrator import SolverConfig
from core.linalg import SymMat, Vec, as_vec
from core.model import LoadSchedule, State, SystemModel, eval_load
from core.systems import SystemSetup
from utils.logger import get_logger

logger = get_logger(__name__)

# Demo network defaults
DEMO_STIFFNESS = 50.0
DEMO_MASS = 1.0
DEMO_DT = 1e-2
DEMO_DURATION = 4.0
DEMO_PULSE_PEAK = 5.0
DEMO_PULSE_DURATION = 1.0


@dataclass(frozen=True)
class Spring:
    """Spring between particles i and j: stiffness (N/m), rest length (m)"""
    i: int
    j: int
    stiffness: float
    rest_length: float = 0.0

    def __post_init__(self):
        if self.stiffness < 0 or self.rest_length < 0:
            raise ValueError(f"Spring ({self.i}, {self.j}) needs non-negative stiffness and rest length")


class SpringNetwork3D(SystemModel):
    """Particle-spring network with per-particle lumped isotropic masses"""

    name = "spring_network"
    kind = "spring_network"
    description = "3D spring network"
    has_symmetry = True
    is_particle_system = True

    def __init__(
        self,
        masses: Sequence[float],
        springs: Sequence[Spring],
        load: Optional[LoadSchedule] = None,
        reference: Optional[Vec] = None,
    ):
        masses = as_vec(masses)
        if np.any(masses <= 0):
            raise ValueError("Particle masses must be positive")
        super().__init__(np.kron(np.diag(masses), np.eye(3)))
        self.masses = masses

        n = masses.size
        for spring in springs:
            if not (0 <= spring.i < n and 0 <= spring.j < n):
                raise BadTopologyError(f"Spring ({spring.i}, {spring.j}) references a particle outside 0..{n - 1}")
            if spring.i == spring.j:
                raise BadTopologyError(f"Spring ({spring.i}, {spring.j}) joins a particle to itself")
        self.springs = tuple(springs)

        self._i = np.array([s.i for s in self.springs], dtype=int)
        self._j = np.array([s.j for s in self.springs], dtype=int)
        self._k = np.array([s.stiffness for s in self.springs], dtype=float)
        self._L = np.array([s.rest_length for s in self.springs], dtype=float)

        if load is not None and load.base_force.size != self.dim:
            raise ValueError(f"Load has {load.base_force.size} entries for a system of dimension {self.dim}")
        self.load = load
        self.reference = None if reference is None else as_vec(reference, dim=self.dim)

    @property
    def n_springs(self) -> int:
        return len(self.springs)

    def _separations(self, q: Vec) -> np.ndarray:
        positions = np.asarray(q, dtype=float).reshape(-1, 3)
        return positions[self._i] - positions[self._j]

    def _scatter(self, per_spring: np.ndarray) -> Vec:
        """Add +v to particle i and -v to particle j for every spring"""
        out = np.zeros((self.n_particles, 3))
        np.add.at(out, self._i, per_spring)
        np.subtract.at(out, self._j, per_spring)
        return out.ravel()

    # ==================== Potential ====================

    def potential(self, q: Vec) -> float:
        return self.reduced_potential(self.invariant_map(q))

    def grad_potential(self, q: Vec) -> Vec:
        d = self._separations(q)
        r = self.reduced_grad(np.einsum("ij,ij->i", d, d))
        return self._scatter(2.0 * r[:, None] * d)

    def analytic_hessian(self, q: Vec) -> SymMat:
        d = self._separations(q)
        lengths = np.linalg.norm(d, axis=1)
        self._check_collapse(lengths ** 2)
        hessian = np.zeros((self.dim, self.dim))
        eye = np.eye(3)
        for e in range(self.n_springs):
            k, L, length = self._k[e], self._L[e], lengths[e]
            if L == 0.0:
                block = k * eye
            else:
                unit = d[e] / length
                block = k * ((1.0 - L / length) * eye + (L / length) * np.outer(unit, unit))
            a, b = 3 * self._i[e], 3 * self._j[e]
            hessian[a:a + 3, a:a + 3] += block
            hessian[b:b + 3, b:b + 3] += block
            hessian[a:a + 3, b:b + 3] -= block
            hessian[b:b + 3, a:a + 3] -= block
        return hessian

    def external_force(self, q: Vec, t: float) -> Vec:
        if self.load is None:
            return np.zeros(self.dim)
        return eval_load(self.load, t)

    def load_end_time(self) -> float:
        return 0.0 if self.load is None else self.load.end_time

    def sample_point(self, rng: np.random.Generator) -> Vec:
        # Perturbations of the reference shape keep springs away from collapse
        if self.reference is None:
            return rng.normal(size=self.dim)
        return self.reference + 0.1 * rng.normal(size=self.dim)

    # ==================== Symmetry ====================

    def invariant_map(self, q: Vec) -> Vec:
        d = self._separations(q)
        return np.einsum("ij,ij->i", d, d)

    def invariant_jacobian(self, q: Vec) -> np.ndarray:
        d = self._separations(q)
        jacobian = np.zeros((self.n_springs, self.dim))
        for e in range(self.n_springs):
            a, b = 3 * self._i[e], 3 * self._j[e]
            jacobian[e, a:a + 3] = 2.0 * d[e]
            jacobian[e, b:b + 3] = -2.0 * d[e]
        return jacobian

    def reduced_potential(self, pi: Vec) -> float:
        lengths = np.sqrt(np.maximum(pi, 0.0))
        return float(np.sum(0.5 * self._k * (lengths - self._L) ** 2))

    def reduced_grad(self, pi: Vec) -> Vec:
        """k_e / 2 (1 - L_e / sqrt(pi_e))"""
        self._check_collapse(pi)
        lengths = np.sqrt(np.maximum(pi, 0.0))
        ratio = np.divide(self._L, lengths, out=np.zeros_like(self._L), where=self._L > 0)
        return 0.5 * self._k * (1.0 - ratio)

    def reduced_dissipation_matrix(self) -> SymMat:
        """Reduced stiffness k_e / (4 L_e^2) at rest length, unit length for L_e = 0"""
        reference = np.where(self._L > 0, self._L, 1.0)
        return np.diag(self._k / (4.0 * reference ** 2))

    def _check_collapse(self, pi: Vec):
        collapsed = (pi <= 0.0) & (self._L > 0)
        if np.any(collapsed):
            e = int(np.flatnonzero(collapsed)[0])
            raise SpringCollapseError(
                f"Particles {self._i[e]} and {self._j[e]} coincide but their spring has rest length {self._L[e]}"
            )

    # ==================== Construction ====================

    @classmethod
    def from_config(cls, params: dict, rng: np.random.Generator) -> SystemSetup:
        if "particles" not in params:
            n_particles = params.get("n_particles", 8)
            load = _load_from_config(params.get("load"), 3 * n_particles)
            if "load" in params and params["load"] is None:
                # Explicit null: free flight from the start
                load = LoadSchedule(base_force=np.zeros(3 * n_particles))
            setup = make_spring_demo(
                n_particles=n_particles,
                topology=params.get("topology", "cube"),
                load=load,
                stiffness=params.get("stiffness", DEMO_STIFFNESS),
                mass=params.get("mass", DEMO_MASS),
            )
        else:
            setup = _network_from_config(params)
        return _with_initial_velocity(setup, params, rng)


def make_spring_demo(
    n_particles: int = 8,
    topology: Union[str, Sequence[tuple[int, int]]] = "cube",
    load: Optional[LoadSchedule] = None,
    stiffness: float = DEMO_STIFFNESS,
    mass: float = DEMO_MASS,
) -> SystemSetup:
    """
    Small free-flying network at rest.

    topology is "cube" (8 particles, edge and face-diagonal springs),
    "chain" (particles along x, neighbours joined) or an explicit list of
    particle pairs on a chain layout. Springs start at their rest length.
    Without a load, a triangular pulse pushes two particles sideways so the
    body leaves with linear and angular momentum and then flies freely.
    """
    if topology == "cube":
        if n_particles != 8:
            raise BadTopologyError(f"The cube topology has 8 particles, got {n_particles}")
        positions = np.array([[x, y, z] for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)])
        pairs = [
            (a, b) for a, b in combinations(range(8), 2)
            if np.count_nonzero(positions[a] != positions[b]) in (1, 2)
        ]
    else:
        positions = np.column_stack([np.arange(n_particles, dtype=float), np.zeros(n_particles), np.zeros(n_particles)])
        pairs = [(a, a + 1) for a in range(n_particles - 1)] if topology == "chain" else [tuple(p) for p in topology]

    springs = []
    for a, b in pairs:
        if not (0 <= a < n_particles and 0 <= b < n_particles):
            raise BadTopologyError(f"Spring ({a}, {b}) references a particle outside 0..{n_particles - 1}")
        springs.append(Spring(a, b, stiffness, float(np.linalg.norm(positions[a] - positions[b]))))

    q0 = positions.ravel()
    if load is None:
        base = np.zeros_like(q0)
        base[0:3] = (0.0, 1.0, 0.0)
        base[3 * (n_particles - 1):] = (0.0, 0.0, 1.0)
        load = LoadSchedule.triangular_pulse(base, peak=DEMO_PULSE_PEAK, duration=DEMO_PULSE_DURATION)

    system = SpringNetwork3D(np.full(n_particles, mass), springs, load=load, reference=q0)
    logger.debug(f"Spring demo: {n_particles} particles, {len(springs)} springs")
    return SystemSetup(
        system=system,
        initial=State(q=q0, s=np.zeros_like(q0)),
        solver=SolverConfig(dt=DEMO_DT),
        duration=DEMO_DURATION,
    )


def _network_from_config(params: dict) -> SystemSetup:
    particles = params["particles"]
    positions = np.array([p["position"] for p in particles], dtype=float)
    velocities = np.array([p.get("velocity", (0.0, 0.0, 0.0)) for p in particles], dtype=float)
    masses = [p.get("mass", DEMO_MASS) for p in particles]

    springs = []
    for entry in params.get("springs", []):
        i, j = entry["i"], entry["j"]
        if not (0 <= i < len(particles) and 0 <= j < len(particles)):
            raise BadTopologyError(f"Spring ({i}, {j}) references a particle outside 0..{len(particles) - 1}")
        rest = entry.get("rest_length")
        if rest is None:
            rest = float(np.linalg.norm(positions[i] - positions[j]))
        springs.append(Spring(i, j, entry.get("stiffness", DEMO_STIFFNESS), rest))

    q0 = positions.ravel()
    system = SpringNetwork3D(
        masses,
        springs,
        load=_load_from_config(params.get("load"), q0.size),
        reference=q0,
    )
    return SystemSetup(system=system, initial=State(q=q0, s=velocities.ravel()))


def _load_from_config(params: Optional[dict], dim: int) -> Optional[LoadSchedule]:
    if params is None:
        return None
    base = as_vec(params["base_force"], dim=dim)
    breakpoints = params.get("breakpoints")
    if breakpoints is None:
        return LoadSchedule.triangular_pulse(base, peak=DEMO_PULSE_PEAK, duration=DEMO_PULSE_DURATION)
    return LoadSchedule(base_force=base, breakpoints=tuple(tuple(p) for p in breakpoints))


def _with_initial_velocity(setup: SystemSetup, params: dict, rng: np.random.Generator) -> SystemSetup:
    """Add a rigid spin and seeded random velocities to the initial state"""
    spin = params.get("spin")
    noise = float(params.get("velocity_noise", 0.0))
    if spin is None and noise == 0.0:
        return setup

    system, state = setup.system, setup.initial
    s0 = state.s.copy()
    if spin is not None:
        s0 = s0 + system.rotation_generator(np.asarray(spin, dtype=float), state.q)
    if noise > 0.0:
        s0 = s0 + noise * rng.normal(size=system.dim)
    return SystemSetup(
        system=system,
        initial=State(q=state.q, s=s0, t=state.t),
        solver=setup.solver,
        dissipation=setup.dissipation,
        duration=setup.duration,
    )
