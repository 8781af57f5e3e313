"""
Discrete Gradient - algorithmic forces and velocities

All formulas use g = dV/dq (see core.model.system_model). A discrete
derivative f(x, y) satisfies directionality <f, y - x> = V(y) - V(x) and
consistency f(x, x) = g(x).

The new conservative force corrects the averaged force g_a along the force
jump dg = g(y) - g(x):

    f = g_a + (C(x, y) + D_f(x, y)) / <dg, dq> * dg

with C the conservation function V(y) - V(x) - <g_a, dq> and D_f the force
dissipation function. The scalar coefficient is the solution of a linearly
constrained quadratic program and does not depend on the metric of that
program; lagrange_multipliers() solves the full stationarity system for a
given metric as a diagnostic.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from core.errors import DegenerateDenominatorError
from core.dgrad.force_scheme import (
    DegeneracyMode,
    DegeneracyPolicy,
    DissipationConfig,
    ForceScheme,
    SchemeVariant,
)
from core.linalg import SymMat, Vec, solve_spd, weighted_norm_sq
from core.model.system_model import SystemModel

_EPS = np.finfo(float).eps

# Conservation defects below this many ulps of the energies involved are roundoff
_NOISE_ULPS = 8.0

_DEFAULT_POLICY = DegeneracyPolicy()


class ForceEvaluation(NamedTuple):
    """Algorithmic force plus the force dissipation it actually realizes"""
    force: Vec
    diss_f: float
    degenerate: bool


# ==================== Conservation / dissipation functions ====================

def conservation_fn(system: SystemModel, x: Vec, y: Vec) -> float:
    """C(x, y) = V(y) - V(x) - <(g(x) + g(y)) / 2, y - x>"""
    g_a = 0.5 * (system.grad_potential(x) + system.grad_potential(y))
    return system.potential(y) - system.potential(x) - float(g_a @ (y - x))


def dissipation_fn_f(cfg: DissipationConfig, x: Vec, y: Vec) -> float:
    """D_f(x, y) = (chi_f / 2h) |y - x|_D^2"""
    if cfg.chi_f == 0.0:
        return 0.0
    dq = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return cfg.chi_f / (2.0 * cfg.h) * weighted_norm_sq(dq, cfg.weight(dq.size))


def dissipation_fn_s(cfg: DissipationConfig, M: SymMat, u: Vec, v: Vec) -> float:
    """D_s(u, v) = (chi_s / h) (sqrt T(v) - sqrt T(u))^2"""
    if cfg.chi_s == 0.0:
        return 0.0
    root_u, root_v = _sqrt_kinetic(M, u), _sqrt_kinetic(M, v)
    return cfg.chi_s / cfg.h * (root_v - root_u) ** 2


# ==================== Algorithmic forces ====================

def conservative_force(
    system: SystemModel,
    x: Vec,
    y: Vec,
    policy: DegeneracyPolicy = _DEFAULT_POLICY,
) -> Vec:
    """Energy-conserving force: averaged force plus the optimal correction"""
    return _corrected_average(system, x, y, 0.0, policy).force


def alpha_coefficients(
    system: SystemModel,
    cfg: DissipationConfig,
    x: Vec,
    y: Vec,
    policy: DegeneracyPolicy = _DEFAULT_POLICY,
) -> tuple[float, float]:
    """
    Coefficients of the half force jump in the conservative and dissipative parts.

    Returns:
        (2 C / <dg, dq>, 2 D_f / <dg, dq>), both 0 under Fallback degeneracy
    """
    g_x, g_y = system.grad_potential(x), system.grad_potential(y)
    dq, dg = y - x, g_y - g_x
    denominator = float(dg @ dq)
    if _is_degenerate(denominator, dg, dq, policy):
        return 0.0, 0.0
    c_value = _clean_conservation(system, x, y, g_x, g_y)
    return 2.0 * c_value / denominator, 2.0 * dissipation_fn_f(cfg, x, y) / denominator


def combined_force(
    system: SystemModel,
    cfg: DissipationConfig,
    x: Vec,
    y: Vec,
    policy: DegeneracyPolicy = _DEFAULT_POLICY,
) -> Vec:
    """Conservative plus dissipative force: <f, dq> = dV + D_f"""
    return _corrected_average(system, x, y, dissipation_fn_f(cfg, x, y), policy).force


def gonzalez_force(
    system: SystemModel,
    x: Vec,
    y: Vec,
    metric: Optional[SymMat] = None,
    policy: DegeneracyPolicy = _DEFAULT_POLICY,
    cfg: Optional[DissipationConfig] = None,
) -> Vec:
    """
    Midpoint force plus a directionality correction along G^-1 (y - x).

    With the identity metric this is the classical Gonzalez discrete gradient.
    When cfg is given, the force dissipation is added along the same direction.
    """
    diss = dissipation_fn_f(cfg, x, y) if cfg is not None else 0.0
    return _gonzalez(system, x, y, metric, diss, policy).force


def g_equivariant_force(
    system: SystemModel,
    cfg: DissipationConfig,
    x: Vec,
    y: Vec,
    policy: DegeneracyPolicy = _DEFAULT_POLICY,
) -> Vec:
    """Momentum-preserving force built from quadratic invariants"""
    return _g_equivariant(system, cfg, x, y, policy).force


def evaluate_force(system: SystemModel, scheme: ForceScheme, x: Vec, y: Vec) -> ForceEvaluation:
    """Dispatch on the scheme variant; used by the integrator"""
    variant = scheme.variant
    policy = scheme.degeneracy
    cfg = scheme.dissipation

    if variant is SchemeVariant.AVERAGE:
        force = 0.5 * (system.grad_potential(x) + system.grad_potential(y))
        return ForceEvaluation(force, 0.0, False)
    if variant is SchemeVariant.MIDPOINT:
        return ForceEvaluation(system.grad_potential(0.5 * (x + y)), 0.0, False)
    if variant is SchemeVariant.NEW_CONSERVATIVE:
        return _corrected_average(system, x, y, dissipation_fn_f(cfg, x, y), policy)
    if variant is SchemeVariant.GONZALEZ:
        return _gonzalez(system, x, y, scheme.metric, dissipation_fn_f(cfg, x, y), policy)
    if variant is SchemeVariant.G_EQUIVARIANT:
        return _g_equivariant(system, cfg, x, y, policy)
    raise ValueError(f"Unknown scheme variant: {variant}")


# ==================== Algorithmic velocity ====================

def velocity_beta(M: SymMat, cfg: DissipationConfig, u: Vec, v: Vec) -> float:
    """
    Dissipative velocity factor D_s / (T(v) - T(u)) in its stabilized form

        beta = (chi_s / h) (sqrt T(v) - sqrt T(u)) / (sqrt T(v) + sqrt T(u))

    which extends continuously by 0 when T(v) = T(u).
    """
    if cfg.chi_s == 0.0:
        return 0.0
    root_u, root_v = _sqrt_kinetic(M, u), _sqrt_kinetic(M, v)
    total = root_u + root_v
    if total == 0.0:
        return 0.0
    return cfg.chi_s / cfg.h * (root_v - root_u) / total


def algorithmic_velocity(M: SymMat, cfg: DissipationConfig, u: Vec, v: Vec) -> Vec:
    """s(u, v) = (1 + beta) (u + v) / 2"""
    return (1.0 + velocity_beta(M, cfg, u, v)) * 0.5 * (u + v)


def algorithmic_velocity_generic(
    M: SymMat,
    dissipation: Callable[[Vec, Vec], float],
    u: Vec,
    v: Vec,
    rel_threshold: float = 1e-12,
) -> Vec:
    """
    Algorithmic velocity for a user-supplied velocity dissipation function.

    beta = D_s / (T(v) - T(u)), set to 0 when the kinetic energy jump is
    below rel_threshold * max(1, T(u) + T(v)).
    """
    t_u, t_v = 0.5 * float(u @ M @ u), 0.5 * float(v @ M @ v)
    jump = t_v - t_u
    if abs(jump) <= rel_threshold * max(1.0, t_u + t_v):
        beta = 0.0
    else:
        beta = dissipation(u, v) / jump
    return (1.0 + beta) * 0.5 * (u + v)


# ==================== One-dimensional oracle ====================

def one_d_discrete_derivative(
    V: Callable[[float], float],
    x: float,
    y: float,
    dV: Optional[Callable[[float], float]] = None,
) -> float:
    """The unique discrete derivative on the real line, (V(y) - V(x)) / (y - x)"""
    if x != y:
        return (V(y) - V(x)) / (y - x)
    if dV is not None:
        return dV(x)
    eps = 1e-6 * max(1.0, abs(x))
    return (V(x + eps) - V(x - eps)) / (2.0 * eps)


# ==================== Multiplier diagnostics ====================

@dataclass(frozen=True)
class Multipliers:
    """Solutions of the force stationarity systems for one metric"""
    alpha_cons: float
    lambda_cons: float
    alpha_diss: float
    lambda_diss: float


def lagrange_multipliers(
    system: SystemModel,
    cfg: DissipationConfig,
    x: Vec,
    y: Vec,
    metric: SymMat,
) -> Multipliers:
    """
    Solve the 2x2 stationarity systems of the conservative and dissipative
    force programs under the given metric. Diagnostic only: the multipliers
    depend on the metric, the alpha values do not.

    Raises:
        DegenerateDenominatorError: if <dg, dq> vanishes (singular system)
    """
    g_x, g_y = system.grad_potential(x), system.grad_potential(y)
    dq, dg = y - x, g_y - g_x
    g_a = 0.5 * (g_x + g_y)
    g_m = system.grad_potential(0.5 * (x + y))

    a11 = 0.5 * weighted_norm_sq(dg, metric)
    a12 = float(dg @ dq)
    if a12 == 0.0:
        raise DegenerateDenominatorError(a12, float(np.linalg.norm(dg) * np.linalg.norm(dq)))
    kkt = np.array([[a11, a12], [a12, 0.0]])

    b_cons = np.array([float(dg @ metric @ (g_m - g_a)), 2.0 * conservation_fn(system, x, y)])
    b_diss = np.array([0.0, 2.0 * dissipation_fn_f(cfg, x, y)])
    alpha_cons, lambda_cons = np.linalg.solve(kkt, b_cons)
    alpha_diss, lambda_diss = np.linalg.solve(kkt, b_diss)
    return Multipliers(float(alpha_cons), float(lambda_cons), float(alpha_diss), float(lambda_diss))


def velocity_multipliers(M: SymMat, cfg: DissipationConfig, u: Vec, v: Vec) -> tuple[float, float]:
    """(beta, mu) from the stationarity system of the velocity program"""
    w = 0.5 * (u + v)
    a11 = 2.0 * 0.5 * float(w @ M @ w)
    a12 = 0.5 * float(v @ M @ v) - 0.5 * float(u @ M @ u)
    if a12 == 0.0:
        raise DegenerateDenominatorError(a12, a11)
    kkt = np.array([[a11, a12], [a12, 0.0]])
    beta, mu = np.linalg.solve(kkt, np.array([0.0, dissipation_fn_s(cfg, M, u, v)]))
    return float(beta), float(mu)


def hessian_metric(system: SystemModel, x: Vec) -> SymMat:
    """
    The metric (D^2 V(x))^-1 under which the new force is locally the
    metric-corrected midpoint formula. Uses the analytic Hessian when present.

    Raises:
        NotSPDError: if the Hessian is not positive definite at x
    """
    hessian = system.analytic_hessian(x)
    if hessian is None:
        hessian = finite_difference_hessian(system, x)
    inverse = solve_spd(hessian, np.eye(system.dim))
    return 0.5 * (inverse + inverse.T)


def finite_difference_hessian(system: SystemModel, x: Vec) -> SymMat:
    """Central differences of the gradient, symmetrized"""
    n = system.dim
    eps = 1e-5 * max(1.0, float(np.linalg.norm(x)))
    hessian = np.empty((n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = eps
        hessian[:, j] = (system.grad_potential(x + step) - system.grad_potential(x - step)) / (2.0 * eps)
    return 0.5 * (hessian + hessian.T)


# ==================== Internals ====================

def _corrected_average(
    system: SystemModel,
    x: Vec,
    y: Vec,
    diss: float,
    policy: DegeneracyPolicy,
) -> ForceEvaluation:
    g_x, g_y = system.grad_potential(x), system.grad_potential(y)
    g_a = 0.5 * (g_x + g_y)
    dq, dg = y - x, g_y - g_x
    denominator = float(dg @ dq)
    if _is_degenerate(denominator, dg, dq, policy):
        return ForceEvaluation(g_a, 0.0, True)
    c_value = _clean_conservation(system, x, y, g_x, g_y)
    return ForceEvaluation(g_a + (c_value + diss) / denominator * dg, diss, False)


def _gonzalez(
    system: SystemModel,
    x: Vec,
    y: Vec,
    metric: Optional[SymMat],
    diss: float,
    policy: DegeneracyPolicy,
) -> ForceEvaluation:
    g_m = system.grad_potential(0.5 * (x + y))
    dq = y - x
    scale = max(1.0, float(np.linalg.norm(x)) + float(np.linalg.norm(y)))
    if float(np.linalg.norm(dq)) <= policy.rel_threshold * scale:
        if policy.mode is DegeneracyMode.STRICT:
            raise DegenerateDenominatorError(float(np.linalg.norm(dq)), scale)
        return ForceEvaluation(g_m, 0.0, True)

    direction = dq if metric is None else solve_spd(metric, dq)
    norm_sq = float(dq @ direction)
    v_x, v_y = system.potential(x), system.potential(y)
    projected = float(g_m @ dq)
    c_hat = _drop_noise(v_y - v_x - projected, v_x, v_y, projected)
    return ForceEvaluation(g_m + (c_hat + diss) / norm_sq * direction, diss, False)


def _g_equivariant(
    system: SystemModel,
    cfg: DissipationConfig,
    x: Vec,
    y: Vec,
    policy: DegeneracyPolicy,
) -> ForceEvaluation:
    pi_x, pi_y = system.invariant_map(x), system.invariant_map(y)
    r_x, r_y = system.reduced_grad(pi_x), system.reduced_grad(pi_y)
    r_a = 0.5 * (r_x + r_y)
    d_pi, d_r = pi_y - pi_x, r_y - r_x
    jacobian = system.invariant_jacobian(0.5 * (x + y))

    denominator = float(d_r @ d_pi)
    if _is_degenerate(denominator, d_r, d_pi, policy):
        return ForceEvaluation(jacobian.T @ r_a, 0.0, True)

    v_x, v_y = system.reduced_potential(pi_x), system.reduced_potential(pi_y)
    projected = float(r_a @ d_pi)
    c_value = _drop_noise(v_y - v_x - projected, v_x, v_y, projected)

    diss = 0.0
    if cfg.chi_f > 0.0:
        weight = cfg.D_invariant if cfg.D_invariant is not None else system.reduced_dissipation_matrix()
        diss = cfg.chi_f / (2.0 * cfg.h) * weighted_norm_sq(d_pi, weight)

    alpha = (c_value + diss) / denominator
    return ForceEvaluation(jacobian.T @ (r_a + alpha * d_r), diss, False)


def _clean_conservation(system: SystemModel, x: Vec, y: Vec, g_x: Vec, g_y: Vec) -> float:
    v_x, v_y = system.potential(x), system.potential(y)
    projected = float(0.5 * (g_x + g_y) @ (y - x))
    return _drop_noise(v_y - v_x - projected, v_x, v_y, projected)


def _drop_noise(defect: float, v_x: float, v_y: float, projected: float) -> float:
    """Zero a conservation defect that is indistinguishable from roundoff"""
    noise = _NOISE_ULPS * _EPS * (abs(v_x) + abs(v_y) + abs(projected))
    return 0.0 if abs(defect) <= noise else defect


def _is_degenerate(denominator: float, a: Vec, b: Vec, policy: DegeneracyPolicy) -> bool:
    scale = float(np.linalg.norm(a)) * float(np.linalg.norm(b)) + _EPS
    if abs(denominator) > policy.rel_threshold * scale:
        return False
    if policy.mode is DegeneracyMode.STRICT:
        raise DegenerateDenominatorError(denominator, scale)
    return True


def _sqrt_kinetic(M: SymMat, s: Vec) -> float:
    return float(np.sqrt(max(0.0, 0.5 * float(s @ M @ s))))
