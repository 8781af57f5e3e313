"""
System Validation - consistency checks on a SystemModel

Checks the mass matrix, the gradient against central finite differences of
the potential and, when symmetry data is present, V = V_reduced o Pi and the
chain rule DPi^T * reduced_grad = grad_potential.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from core.errors import GdrError
from core.linalg import is_spd
from core.model.system_model import SystemModel
from utils.logger import get_logger

logger = get_logger(__name__)

GRADIENT_REL_TOL = 1e-5
SYMMETRY_REL_TOL = 1e-10


class ViolationKind(Enum):
    MASS_NOT_SPD = "mass_not_spd"
    MASS_NOT_CONSTANT = "mass_not_constant"
    GRADIENT_MISMATCH = "gradient_mismatch"
    REDUCED_POTENTIAL_MISMATCH = "reduced_potential_mismatch"
    CHAIN_RULE_MISMATCH = "chain_rule_mismatch"
    EVALUATION_ERROR = "evaluation_error"


@dataclass
class Violation:
    """One failed check"""
    kind: ViolationKind
    message: str
    point: Optional[np.ndarray] = None


def validate_system(
    system: SystemModel,
    n_points: int = 10,
    rng: Optional[np.random.Generator] = None,
) -> list[Violation]:
    """
    Validate a system at random points.

    Returns:
        List of violations; an empty list means the system is valid
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    violations: list[Violation] = []

    mass = system.mass()
    if not is_spd(mass):
        violations.append(Violation(ViolationKind.MASS_NOT_SPD, "Mass matrix is not SPD"))
    if not np.array_equal(mass, system.mass()):
        violations.append(Violation(ViolationKind.MASS_NOT_CONSTANT, "Mass matrix changed between calls"))

    for _ in range(n_points):
        q = system.sample_point(rng)
        try:
            violations.extend(_check_gradient(system, q))
            if system.has_symmetry:
                violations.extend(_check_symmetry(system, q))
        except GdrError as e:
            violations.append(Violation(ViolationKind.EVALUATION_ERROR, str(e), q))

    if violations:
        logger.warning(f"{system.name}: {len(violations)} validation violations")
    else:
        logger.debug(f"{system.name}: validation passed at {n_points} points")
    return violations


def _check_gradient(system: SystemModel, q: np.ndarray) -> list[Violation]:
    scale = max(1.0, float(np.linalg.norm(q)))
    eps = 1e-6 * scale
    grad = system.grad_potential(q)
    fd = np.empty_like(grad)
    for i in range(system.dim):
        step = np.zeros(system.dim)
        step[i] = eps
        fd[i] = (system.potential(q + step) - system.potential(q - step)) / (2.0 * eps)

    error = float(np.linalg.norm(fd - grad))
    bound = GRADIENT_REL_TOL * max(1.0, float(np.linalg.norm(grad)), float(np.linalg.norm(fd)))
    if error > bound:
        return [Violation(
            ViolationKind.GRADIENT_MISMATCH,
            f"Gradient differs from finite differences by {error:.3e} (bound {bound:.3e})",
            q,
        )]
    return []


def _check_symmetry(system: SystemModel, q: np.ndarray) -> list[Violation]:
    found = []
    pi = system.invariant_map(q)
    value = system.potential(q)
    reduced = system.reduced_potential(pi)
    if abs(value - reduced) > SYMMETRY_REL_TOL * max(1.0, abs(value)):
        found.append(Violation(
            ViolationKind.REDUCED_POTENTIAL_MISMATCH,
            f"V(q)={value:.17g} but reduced V(Pi(q))={reduced:.17g}",
            q,
        ))

    grad = system.grad_potential(q)
    chain = system.invariant_jacobian(q).T @ system.reduced_grad(pi)
    error = float(np.linalg.norm(chain - grad))
    if error > SYMMETRY_REL_TOL * max(1.0, float(np.linalg.norm(grad))):
        found.append(Violation(
            ViolationKind.CHAIN_RULE_MISMATCH,
            f"DPi^T * reduced_grad differs from the gradient by {error:.3e}",
            q,
        ))
    return found
