"""Model parameters, quasimomentum grid, phase boundaries and classification.

Three cavity-qubit Rabi systems sit on a ring with complex photon hopping
J e^{+/- i theta}.  In the large-gap limit the normal phase becomes unstable
at a coupling g1c(q, theta) that depends on which quasimomentum mode softens,
and the superradiant region splits into a uniform (ferromagnetic) phase, a
chiral phase and, on the theta = 0 line, a frustrated antiferromagnetic one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import AmbiguousPhase, DomainError

TWO_PI_3 = 2.0 * math.pi / 3.0

#: The three quasimomenta of a three-site ring.
Q_VALUES = (0.0, TWO_PI_3, -TWO_PI_3)

#: Default relative tolerance for boundary-proximity decisions.
BOUNDARY_TOL = 1e-9


def normalize_theta(theta: float) -> float:
    """Map an angle to the canonical interval (-pi, pi]."""
    t = math.fmod(theta, 2.0 * math.pi)
    if t <= -math.pi:
        t += 2.0 * math.pi
    elif t > math.pi:
        t -= 2.0 * math.pi
    return t


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of the three-cavity Rabi ring.

    omega
        Photon frequency; sets the energy scale (must be positive).
    delta
        Qubit gap.  Only photon-number observables and the exact
        diagonalization oracle depend on it; the effective theory is
        formulated in the delta/omega -> infinity limit.
    j_hop
        Hopping amplitude J, restricted to 0 <= 2J < omega so that all
        bare mode frequencies stay positive.
    theta
        Hopping phase from the artificial gauge field, normalized to
        (-pi, pi] at construction.
    g1
        Scaled qubit-cavity coupling g / sqrt(delta * omega).
    """

    omega: float
    delta: float
    j_hop: float
    theta: float
    g1: float

    def __post_init__(self):
        if not self.omega > 0.0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if not self.delta > 0.0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.g1 < 0.0:
            raise DomainError(f"g1 must be nonnegative, got {self.g1}")
        if self.j_hop < 0.0 or 2.0 * self.j_hop >= self.omega:
            raise DomainError(
                f"j_hop must satisfy 0 <= 2J < omega, got J={self.j_hop}, omega={self.omega}"
            )
        object.__setattr__(self, "theta", normalize_theta(self.theta))

    @property
    def g(self) -> float:
        """Bare coupling g = g1 * sqrt(delta * omega)."""
        return self.g1 * math.sqrt(self.delta * self.omega)

    @property
    def delta_over_omega(self) -> float:
        return self.delta / self.omega


class PhaseKind(Enum):
    NP = "NP"
    FSP = "FSP"
    CSP = "CSP"
    FASP = "FASP"


@dataclass(frozen=True)
class PhaseLabel:
    """Phase kind plus the quasimomentum whose gap closes at the boundary."""

    kind: PhaseKind
    soft_q: float


def boundary_g1c(q: float, theta: float, omega: float, j_hop: float) -> float:
    """Critical coupling of the quasimomentum-q instability.

    Symmetric under q -> -q and under (theta -> -theta, q -> -q).
    """
    a = omega + 2.0 * j_hop * math.cos(q - theta)
    b = omega + 2.0 * j_hop * math.cos(q + theta)
    den = 2.0 * omega * (a + b)
    if den <= 0.0:
        raise DomainError("nonpositive denominator in boundary formula")
    rad = a * b / den
    if rad < 0.0:
        raise DomainError("negative radicand in boundary formula")
    return math.sqrt(rad)


def critical_theta(omega: float, j_hop: float) -> float:
    """Hopping phase at which the q=0 and |q|=2pi/3 boundaries cross.

    Lies in (pi/2, pi) for J > 0; equals pi/2 at J = 0.
    """
    if not omega > 0.0:
        raise DomainError("omega must be positive")
    return math.acos(-2.0 * j_hop / (math.sqrt(8.0 * j_hop**2 + omega**2) + omega))


def soft_pair_q(theta: float) -> float:
    """Soft member of the |q|=2pi/3 pair: the mode with the lower frequency."""
    if theta > 0.0:
        return -TWO_PI_3
    return TWO_PI_3


def min_boundary(theta: float, omega: float, j_hop: float) -> tuple[float, float]:
    """Lowest instability coupling over q and the corresponding soft mode."""
    b0 = boundary_g1c(0.0, theta, omega, j_hop)
    b1 = boundary_g1c(TWO_PI_3, theta, omega, j_hop)
    if b0 <= b1:
        return b0, 0.0
    return b1, soft_pair_q(theta)


def classify_phase(params: ModelParams, tol: float = BOUNDARY_TOL) -> PhaseLabel:
    """Locate a parameter point in the phase diagram.

    Raises AmbiguousPhase when the point sits within ``tol`` (relative) of
    the superradiant boundary or of the first-order lines at |theta| =
    theta_c; the caller then decides which side to take.  theta within
    ``tol`` of zero is classified FASP, not ambiguous.
    """
    g1c, soft = min_boundary(params.theta, params.omega, params.j_hop)
    if abs(params.g1 - g1c) <= tol * max(1.0, g1c):
        raise AmbiguousPhase(
            f"g1={params.g1} within tolerance of the boundary g1c={g1c}"
        )
    if params.g1 < g1c:
        return PhaseLabel(PhaseKind.NP, soft)

    abs_theta = abs(params.theta)
    if abs_theta <= tol:
        return PhaseLabel(PhaseKind.FASP, soft_pair_q(params.theta))
    th_c = critical_theta(params.omega, params.j_hop)
    if abs(abs_theta - th_c) <= tol * th_c:
        raise AmbiguousPhase(
            f"|theta|={abs_theta} within tolerance of theta_c={th_c}"
        )
    if abs_theta > th_c:
        return PhaseLabel(PhaseKind.FSP, 0.0)
    return PhaseLabel(PhaseKind.CSP, soft_pair_q(params.theta))
