"""Quantum Fisher information of the scaled coupling in each phase.

All expressions give the QFI of the effective quadratic family: the ground
state of the displaced, dressed quadratic Hamiltonian as a function of g1,
with the mean-field displacement re-solved at every coupling (the anomalous
coefficients carry their full implicit g1 dependence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousPhase, StepTooLarge
from .meanfield import (
    Displacement,
    csp_displacement,
    fsp_displacement,
    zero_displacement,
)
from .model import ModelParams, PhaseKind, PhaseLabel, classify_phase, min_boundary
from .quadratic import build_csp_matrix, fsp_kappa, symplectic_diagonalize

#: Denominators below this (in units of omega) mark the QFI as divergent.
DIVERGENCE_TOL = 1e-12


@dataclass
class QfiResult:
    """QFI value with its per-mode additive decomposition."""

    value: float
    phase: PhaseLabel
    contributions: dict[str, float] = field(default_factory=dict)
    divergent: bool = False


def fd_step(params: ModelParams) -> float:
    """Central-difference step for d/dg1, shrinking with boundary distance."""
    g1c, _ = min_boundary(params.theta, params.omega, params.j_hop)
    return max(1e-6, 1e-4 * abs(g1c - params.g1))


def _with_g1(params: ModelParams, g1: float) -> ModelParams:
    return ModelParams(params.omega, params.delta, params.j_hop, params.theta, g1)


def _sector_sum(omega, j_hop, theta, kappa, prefactor, phase) -> QfiResult:
    q = np.array([0.0, 2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0])
    s = 2.0 * omega - 4.0 * kappa + 4.0 * j_hop * math.cos(theta) * np.cos(q)
    den = s - 4.0 * kappa
    labels = ("q=0", "q=+2pi/3", "q=-2pi/3")
    if np.any(den <= DIVERGENCE_TOL * omega):
        contrib = {lab: math.inf if d <= DIVERGENCE_TOL * omega else 2.0 * prefactor / d**2
                   for lab, d in zip(labels, den)}
        return QfiResult(math.inf, phase, contrib, divergent=True)
    terms = 2.0 * prefactor / den**2
    contrib = dict(zip(labels, terms.tolist()))
    return QfiResult(float(np.sum(terms)), phase, contrib)


def qfi_np(params: ModelParams) -> QfiResult:
    """Normal-phase QFI, 16 w^2 g1^2 sum_q 2 / (w_q + w_{-q} - 4 w g1^2)^2."""
    w, g1 = params.omega, params.g1
    phase = PhaseLabel(PhaseKind.NP, min_boundary(params.theta, w, params.j_hop)[1])
    return _sector_sum(w, params.j_hop, params.theta, g1**2 * w, 16.0 * w**2 * g1**2, phase)


def qfi_fsp(params: ModelParams) -> QfiResult:
    """Uniform-branch QFI with the closed-form anomalous-coefficient derivative."""
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    kappa = fsp_kappa(params)
    pref = (2.0 * j * math.cos(th) + w) ** 6 / (64.0 * g1**10 * w**4)
    phase = PhaseLabel(PhaseKind.FSP, 0.0)
    return _sector_sum(w, j, th, kappa, pref, phase)


def explicit_kappa_derivative(params: ModelParams, disp: Displacement) -> np.ndarray:
    """Explicit d/dg1 of the anomalous coefficients at fixed displacement.

    For kappa_n = g1^2 w (1 + 16 g1^2 A_n^2)^{-3/2} this is
    2 g1 w (1 - 8 g1^2 A_n^2) / (1 + 16 g1^2 A_n^2)^{5/2}.  This is the
    derivative that enters the perturbative QFI sums: the quadratic family
    is differentiated in the frame of the central point, so the mean-field
    amplitudes are spectators.  (The total derivative, which also tracks the
    amplitudes, follows the critical manifold and cancels the leading
    divergence of the soft-mode term.)
    """
    g1, w = params.g1, params.omega
    a2 = disp.a_tilde**2
    return 2.0 * g1 * w * (1.0 - 8.0 * g1**2 * a2) / (1.0 + 16.0 * g1**2 * a2) ** 2.5


def derivative_lambda_over_delta(
    params: ModelParams,
    disp: Displacement | None = None,
    h: float | None = None,
    phase_kind: PhaseKind | None = None,
) -> np.ndarray:
    """Total derivative d/dg1 of the per-cavity anomalous coefficients.

    Central differences with the displacement re-solved at g1 +/- h (warm
    started from the central solution so the branch cannot flip).
    """
    if phase_kind is None:
        phase_kind = classify_phase(params).kind
    if h is None:
        h = fd_step(params)

    def kappa_at(g1: float) -> np.ndarray:
        p = _with_g1(params, g1)
        if phase_kind == PhaseKind.NP:
            d = zero_displacement()
        elif phase_kind == PhaseKind.FSP:
            d = fsp_displacement(p)
        else:
            d = csp_displacement(p, seeds=[disp] if disp is not None else None)
        return d.kappa(p)

    try:
        hi = kappa_at(params.g1 + h)
        lo = kappa_at(params.g1 - h)
    except Exception as exc:  # re-solve failed at the shifted coupling
        raise StepTooLarge(f"displacement re-solve failed at g1 +/- {h}: {exc}") from exc
    return (hi - lo) / (2.0 * h)


def qfi_csp(
    params: ModelParams,
    disp: Displacement | None = None,
    h: float | None = None,
    kind: PhaseKind = PhaseKind.CSP,
    derivative: str = "explicit",
) -> QfiResult:
    """QFI on the chiral/frustrated branch from the 6x6 normal modes.

    Perturbative sum over the two-excitation states: for row combinations
    P_{n,i} = T_{n,i} + conj(T_{n,i+3}) and mode weights D_n (explicit
    derivatives of the anomalous coefficients at fixed displacement),

        I = sum_i 2 |sum_n D_n P_{n,i}^2|^2 / eps_i^2
          + 16 sum_{i<j} |sum_n D_n P_{n,i} P_{n,j}|^2 / (eps_i + eps_j)^2.

    ``derivative="resolved"`` instead uses the total derivative (displacement
    re-solved at shifted couplings); see explicit_kappa_derivative for why
    the explicit weights are the defaults.
    """
    if disp is None:
        disp = csp_displacement(params)
    sol = symplectic_diagonalize(build_csp_matrix(params, disp), params.omega)
    if derivative == "explicit":
        d_n = explicit_kappa_derivative(params, disp)
    else:
        d_n = derivative_lambda_over_delta(params, disp, h=h, phase_kind=kind)
    p = sol.U + np.conj(sol.V)  # (n, i)
    eps = sol.eps
    from .model import soft_pair_q

    soft = soft_pair_q(params.theta) if kind == PhaseKind.CSP else soft_pair_q(0.0)
    phase = PhaseLabel(kind, soft)
    if np.any(eps <= DIVERGENCE_TOL * params.omega):
        return QfiResult(math.inf, phase, {}, divergent=True)

    contrib: dict[str, float] = {}
    total = 0.0
    for i in range(3):
        amp = np.sum(d_n * p[:, i] ** 2)
        term = 2.0 * abs(amp) ** 2 / eps[i] ** 2
        contrib[f"mode_{i + 1}"] = float(term)
        total += term
    for i in range(3):
        for jx in range(i + 1, 3):
            amp = np.sum(d_n * p[:, i] * p[:, jx])
            term = 16.0 * abs(amp) ** 2 / (eps[i] + eps[jx]) ** 2
            contrib[f"pair_{i + 1}{jx + 1}"] = float(term)
            total += term
    return QfiResult(float(total), phase, contrib)


def qfi(params: ModelParams, tol: float = 1e-9, disp: Displacement | None = None) -> QfiResult:
    """Phase-dispatched QFI of g1; propagates AmbiguousPhase at boundaries."""
    label = classify_phase(params, tol=tol)
    if label.kind == PhaseKind.NP:
        return qfi_np(params)
    if label.kind == PhaseKind.FSP:
        return qfi_fsp(params)
    return qfi_csp(params, disp=disp, kind=label.kind)
