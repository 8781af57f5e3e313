"""
Newton Stepper - discrete residuals, Newton-Raphson step and time loop

Unknowns of a step are u = (q_{n+1}, s_{n+1}). The residuals are

    r_s = M (q_{n+1} - q_n) / dt - M s(s_n, s_{n+1})
    r_q = M (s_{n+1} - s_n) / dt + f(q_n, q_{n+1}) - f_ext(q_{n+1/2}, t_{n+1/2})

with s the algorithmic velocity and f the force of the active scheme.
"""

from dataclasses import replace
from typing import Callable, Optional

import numpy as np

from core.dgrad import (
    ForceEvaluation,
    ForceScheme,
    SchemeVariant,
    algorithmic_velocity,
    dissipation_fn_s,
    evaluate_force,
    velocity_beta,
)
from core.errors import (
    MissingSymmetryDataError,
    NewtonDivergedError,
    SingularJacobianError,
    SingularMatrixError,
    TimeGridError,
)
from core.integrator.solver_config import JacobianMode, SolverConfig
from core.integrator.trajectory import StepReport, Trajectory
from core.linalg import Vec, solve_general
from core.model import State, SystemModel
from utils.logger import get_logger

logger = get_logger(__name__)

_SQRT_EPS = float(np.sqrt(np.finfo(float).eps))

# Relative slack when checking that the run length is a whole number of steps
_GRID_TOL = 1e-8


def residual(
    system: SystemModel,
    scheme: ForceScheme,
    cfg: SolverConfig,
    prev: State,
    trial: State,
) -> tuple[Vec, Vec]:
    """Residual pair (r_s, r_q) of a trial state against the previous one"""
    r_s, r_q, _ = _residual(system, bind_time_step(scheme, cfg.dt), cfg.dt, prev, trial.q, trial.s)
    return r_s, r_q


def step(
    system: SystemModel,
    scheme: ForceScheme,
    cfg: SolverConfig,
    prev: State,
    step_index: int = 0,
    t_next: Optional[float] = None,
) -> StepReport:
    """
    Advance one step with Newton-Raphson.

    Args:
        step_index: Index used in error messages and logs
        t_next: Time of the new state; prev.t + dt when None

    Raises:
        NewtonDivergedError: if the tolerance is not met within max_iters
        SingularJacobianError: if a Newton system cannot be solved
    """
    scheme = bind_time_step(scheme, cfg.dt)
    dt = cfg.dt
    n = system.dim
    M = system.mass()

    def stacked_residual(u: Vec) -> tuple[Vec, ForceEvaluation]:
        r_s, r_q, force = _residual(system, scheme, dt, prev, u[:n], u[n:])
        return np.concatenate([r_s, r_q]), force

    # Constant-velocity predictor
    u = np.concatenate([prev.q + dt * prev.s, prev.s])
    r, force = stacked_residual(u)
    scale = max(1.0, float(np.linalg.norm(r)))
    norm = float(np.linalg.norm(r))
    iters = 0

    while norm / scale > cfg.rel_tol:
        if iters >= cfg.max_iters:
            logger.error(f"Step {step_index}: no convergence, residual {norm:.3e} after {iters} iterations")
            raise NewtonDivergedError(step_index, norm, iters)

        jacobian = _jacobian(system, scheme, cfg, prev, u, r, stacked_residual)
        try:
            du = solve_general(jacobian, -r)
        except SingularMatrixError as e:
            logger.error(f"Step {step_index}: singular Jacobian")
            raise SingularJacobianError(step_index, str(e)) from e

        u = u + du
        r, force = stacked_residual(u)
        norm = float(np.linalg.norm(r))
        iters += 1
        logger.debug(f"Step {step_index}: iteration {iters}, relative residual {norm / scale:.3e}")

        if not np.isfinite(norm):
            logger.error(f"Step {step_index}: residual is not finite")
            raise NewtonDivergedError(step_index, norm, iters)

    state = State.from_stacked(u, prev.t + dt if t_next is None else t_next)
    q1, s1 = state.q, state.s
    f_ext = system.external_force(0.5 * (prev.q + q1), prev.t + 0.5 * dt)

    return StepReport(
        state=state,
        iters=iters,
        residual_norm=norm,
        kinetic=system.kinetic_energy(s1),
        potential=system.potential(q1),
        work_ext=float(f_ext @ (q1 - prev.q)),
        diss_f=force.diss_f,
        diss_s=dissipation_fn_s(scheme.dissipation, M, prev.s, s1),
        degenerate_fallback=force.degenerate,
    )


def integrate(
    system: SystemModel,
    scheme: ForceScheme,
    cfg: SolverConfig,
    initial: State,
    t_end: float,
    on_step: Optional[Callable[[StepReport], None]] = None,
) -> Trajectory:
    """
    Integrate on the uniform grid t_k = t0 + k * dt up to t_end.

    Args:
        on_step: Optional callback receiving each new report

    Raises:
        TimeGridError: if t_end < t0 or (t_end - t0) / dt is not an integer
        MissingSymmetryDataError: if the scheme needs invariants the system lacks
        NewtonDivergedError, SingularJacobianError: from the failing step
    """
    n_steps = steps_between(initial.t, t_end, cfg.dt)
    check_scheme(system, scheme)
    scheme = bind_time_step(scheme, cfg.dt)

    trajectory = Trajectory(dt=cfg.dt, records=[StepReport.initial(system, initial)])
    logger.debug(f"Integrating {system.name} with {scheme.variant.value}: {n_steps} steps of {cfg.dt}")

    current = initial
    for k in range(n_steps):
        report = step(system, scheme, cfg, current, step_index=k + 1, t_next=initial.t + (k + 1) * cfg.dt)
        if report.degenerate_fallback:
            if trajectory.degenerate_steps == 0:
                logger.warning(f"Degenerate denominator at step {k + 1}, correction dropped")
            trajectory.degenerate_steps += 1
        trajectory.records.append(report)
        if on_step is not None:
            on_step(report)
        current = report.state

    if trajectory.degenerate_steps > 1:
        logger.warning(f"{trajectory.degenerate_steps} steps fell back to the uncorrected force")
    return trajectory


def steps_between(t0: float, t_end: float, dt: float) -> int:
    """Number of steps of size dt from t0 to t_end"""
    if t_end < t0:
        raise TimeGridError(f"t_end={t_end} precedes t0={t0}")
    ratio = (t_end - t0) / dt
    n_steps = int(round(ratio))
    if abs(ratio - n_steps) > _GRID_TOL * max(1.0, ratio):
        raise TimeGridError(f"Interval [{t0}, {t_end}] is not a whole number of steps of {dt}")
    return n_steps


def check_scheme(system: SystemModel, scheme: ForceScheme):
    """Reject scheme/system combinations before the first step"""
    if scheme.requires_symmetry and not system.has_symmetry:
        raise MissingSymmetryDataError(f"{scheme.variant.value} needs invariants, {system.name} provides none")
    if scheme.dissipation.chi_f > 0 and scheme.variant in (SchemeVariant.AVERAGE, SchemeVariant.MIDPOINT):
        logger.warning(f"chi_f is ignored by the {scheme.variant.value} force")


def bind_time_step(scheme: ForceScheme, dt: float) -> ForceScheme:
    """Scheme whose dissipation functions use the solver time step"""
    if scheme.dissipation.h == dt:
        return scheme
    return replace(scheme, dissipation=replace(scheme.dissipation, h=dt))


# ==================== Internals ====================

def _residual(
    system: SystemModel,
    scheme: ForceScheme,
    dt: float,
    prev: State,
    q1: Vec,
    s1: Vec,
) -> tuple[Vec, Vec, ForceEvaluation]:
    M = system.mass()
    s_alg = algorithmic_velocity(M, scheme.dissipation, prev.s, s1)
    force = evaluate_force(system, scheme, prev.q, q1)
    t_half = prev.t + 0.5 * dt
    f_ext = system.external_force(0.5 * (prev.q + q1), t_half)

    r_s = M @ (q1 - prev.q) / dt - M @ s_alg
    r_q = M @ (s1 - prev.s) / dt + force.force - f_ext
    return r_s, r_q, force


def _jacobian(
    system: SystemModel,
    scheme: ForceScheme,
    cfg: SolverConfig,
    prev: State,
    u: Vec,
    r: Vec,
    stacked_residual: Callable[[Vec], tuple[Vec, ForceEvaluation]],
) -> np.ndarray:
    if cfg.jacobian is JacobianMode.ANALYTIC:
        jacobian = _approximate_tangent(system, scheme, cfg.dt, prev, u)
        if jacobian is not None:
            return jacobian
    return _finite_difference_jacobian(u, r, stacked_residual)


def _finite_difference_jacobian(
    u: Vec,
    r: Vec,
    stacked_residual: Callable[[Vec], tuple[Vec, ForceEvaluation]],
) -> np.ndarray:
    """Forward differences, column step sqrt(eps) * max(1, |u_j|)"""
    jacobian = np.empty((r.size, u.size))
    for j in range(u.size):
        delta = _SQRT_EPS * max(1.0, abs(u[j]))
        bumped = u.copy()
        bumped[j] += delta
        jacobian[:, j] = (stacked_residual(bumped)[0] - r) / delta
    return jacobian


def _approximate_tangent(
    system: SystemModel,
    scheme: ForceScheme,
    dt: float,
    prev: State,
    u: Vec,
) -> Optional[np.ndarray]:
    """
    Tangent of the averaged-force residual; force corrections and the
    derivative of the velocity factor are left out.
    """
    n = system.dim
    hessian = system.analytic_hessian(u[:n])
    if hessian is None:
        return None

    M = system.mass()
    beta = velocity_beta(M, scheme.dissipation, prev.s, u[n:])
    return np.block([
        [M / dt, -0.5 * (1.0 + beta) * M],
        [0.5 * hessian, M / dt],
    ])
