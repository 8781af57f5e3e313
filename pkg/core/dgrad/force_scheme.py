"""
Force Scheme - which algorithmic force is used and how much dissipation it adds
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from core.constants import DEFAULT_DEGENERACY_THRESHOLD
from core.linalg import SymMat, as_symmat
from core.linalg.dense import is_psd


class SchemeVariant(Enum):
    """Algorithmic internal force variants"""
    AVERAGE = "average"                    # (g(x) + g(y)) / 2, no correction
    MIDPOINT = "midpoint"                  # g((x + y) / 2)
    NEW_CONSERVATIVE = "new_conservative"  # averaged force plus optimal correction
    GONZALEZ = "gonzalez"                  # midpoint force plus metric correction
    G_EQUIVARIANT = "g_equivariant"        # correction built in invariant space


class DegeneracyMode(Enum):
    FALLBACK = "fallback"
    STRICT = "strict"


@dataclass(frozen=True)
class DegeneracyPolicy:
    """What to do when a correction denominator is numerically zero"""
    rel_threshold: float = DEFAULT_DEGENERACY_THRESHOLD
    mode: DegeneracyMode = DegeneracyMode.FALLBACK

    def __post_init__(self):
        if not self.rel_threshold > 0:
            raise ValueError(f"rel_threshold must be positive, got {self.rel_threshold}")
        object.__setattr__(self, "mode", DegeneracyMode(self.mode))


@dataclass(frozen=True)
class DissipationConfig:
    """
    Controllable numerical dissipation.

    chi_f scales the force dissipation (chi_f / 2h) |y - x|_D^2 and chi_s the
    velocity dissipation (chi_s / h) (sqrt T(v) - sqrt T(u))^2. D_invariant is
    the weight used in invariant space by the G-equivariant force; when None
    the system's default is used.
    """
    chi_f: float = 0.0
    chi_s: float = 0.0
    D: Optional[SymMat] = None
    h: float = 1.0
    D_invariant: Optional[SymMat] = None

    def __post_init__(self):
        if self.chi_f < 0 or self.chi_s < 0:
            raise ValueError(f"Dissipation parameters must be non-negative (chi_f={self.chi_f}, chi_s={self.chi_s})")
        if not self.h > 0:
            raise ValueError(f"Time step must be positive, got h={self.h}")
        for attr in ("D", "D_invariant"):
            value = getattr(self, attr)
            if value is None:
                continue
            mat = as_symmat(value)
            if not is_psd(mat):
                raise ValueError(f"{attr} must be positive semi-definite")
            mat.setflags(write=False)
            object.__setattr__(self, attr, mat)

    @classmethod
    def none(cls, h: float = 1.0) -> "DissipationConfig":
        return cls(h=h)

    @property
    def is_active(self) -> bool:
        return self.chi_f > 0 or self.chi_s > 0

    def weight(self, dim: int) -> SymMat:
        """Configuration-space dissipation matrix; identity when unset"""
        if self.D is None:
            return np.eye(dim)
        return self.D


@dataclass(frozen=True)
class ForceScheme:
    """Choice of algorithmic force plus its dissipation and degeneracy settings"""
    variant: SchemeVariant = SchemeVariant.NEW_CONSERVATIVE
    dissipation: DissipationConfig = field(default_factory=DissipationConfig)
    degeneracy: DegeneracyPolicy = field(default_factory=DegeneracyPolicy)
    # Metric for the Gonzalez variant; identity when None
    metric: Optional[SymMat] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", SchemeVariant(self.variant))

    @property
    def requires_symmetry(self) -> bool:
        return self.variant is SchemeVariant.G_EQUIVARIANT

    @property
    def dissipates_force(self) -> bool:
        return self.dissipation.chi_f > 0 and self.variant in (
            SchemeVariant.NEW_CONSERVATIVE,
            SchemeVariant.GONZALEZ,
            SchemeVariant.G_EQUIVARIANT,
        )


class DissipationCase(Enum):
    """Which of the two dissipation mechanisms of a preset stay active"""
    CONSERVATIVE = "conservative"
    FORCE = "force"
    VELOCITY = "velocity"
    FULL = "full"

    def apply(self, preset: DissipationConfig) -> DissipationConfig:
        chi_f = preset.chi_f if self in (DissipationCase.FORCE, DissipationCase.FULL) else 0.0
        chi_s = preset.chi_s if self in (DissipationCase.VELOCITY, DissipationCase.FULL) else 0.0
        return replace(preset, chi_f=chi_f, chi_s=chi_s)
