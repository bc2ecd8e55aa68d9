"""Ground-state photon observables and the photon-number measurement.

A Gaussian ground state is summarized by the cavity-basis Bogoliubov blocks
(U, V) and a displacement.  Means and variances of photon numbers follow from
Wick contractions of the fluctuation correlators

    N_nm = <a_n^dag a_m> = (U U^dag)_nm,   M_nm = <a_n a_m> = conj(V U^T)_nm.

The inverted variance compares a photon-number measurement against the QFI.
The headline figure of merit uses the fluctuation (squeezing) sector of the
collective photon number, the same sector the QFI expressions describe, so
the Cramer-Rao inequality F <= I holds exactly.  Variants including the
mean-field part and the truncated textbook-style variances are also computed
and reported side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroVariance
from .meanfield import Displacement, csp_displacement, fsp_displacement, zero_displacement
from .model import ModelParams, PhaseKind, PhaseLabel, classify_phase
from .qfi import fd_step, qfi, qfi_csp, qfi_fsp, qfi_np
from .quadratic import (
    MomentumModes,
    SymplecticSolution,
    build_csp_matrix,
    fsp_modes,
    np_modes,
    symplectic_diagonalize,
)

_SITES = np.arange(3)


@dataclass
class GaussianCavityState:
    """Cavity-basis Gaussian data: Bogoliubov blocks plus displacement."""

    U: np.ndarray
    V: np.ndarray
    alpha_tilde: np.ndarray  # rescaled displacement, physical alpha = sqrt(delta/omega) * this

    def __post_init__(self):
        self.n_mat = self.U @ self.U.conj().T
        self.m_mat = np.conj(self.V @ self.U.T)

    def alpha(self, delta_over_omega: float) -> np.ndarray:
        return math.sqrt(delta_over_omega) * self.alpha_tilde

    def measured_site(self) -> int:
        """Cavity whose photon number grows fastest near the boundary.

        The ring sites are physically equivalent; the gauge-fixed solution
        pins the broken-symmetry pattern to specific sites, and the soft
        fluctuations can avoid the gauge-special cavity.  The measured
        cavity is the one with the largest fluctuation occupancy (lowest
        index on ties), which is the divergent resource.
        """
        occ = np.real(np.diag(self.n_mat))
        best = float(np.max(occ))
        for site in range(3):
            if occ[site] >= best * (1.0 - 1e-9):
                return site
        return int(np.argmax(occ))

    # -- single-cavity moments ------------------------------------------------

    def n_mean(self, site: int = 0, delta_over_omega: float = 0.0) -> float:
        n = float(self.n_mat[site, site].real)
        if delta_over_omega:
            n += float(abs(self.alpha(delta_over_omega)[site]) ** 2)
        return n

    def n_var(self, site: int = 0, delta_over_omega: float = 0.0) -> float:
        n = float(self.n_mat[site, site].real)
        m = self.m_mat[site, site]
        var = n * (n + 1.0) + abs(m) ** 2
        if delta_over_omega:
            a = self.alpha(delta_over_omega)[site]
            var += 2.0 * (np.conj(a) ** 2 * m).real + abs(a) ** 2 * (2.0 * n + 1.0)
        return float(var)

    # -- collective moments (per-cavity average) -------------------------------

    def collective_mean(self, delta_over_omega: float = 0.0) -> float:
        n = float(np.trace(self.n_mat).real) / 3.0
        if delta_over_omega:
            n += float(np.sum(np.abs(self.alpha(delta_over_omega)) ** 2)) / 3.0
        return n

    def collective_var(self, delta_over_omega: float = 0.0) -> float:
        quad = (
            float(np.sum(np.abs(self.m_mat) ** 2))
            + float(np.trace(self.n_mat @ self.n_mat).real)
            + float(np.trace(self.n_mat).real)
        )
        var = quad
        if delta_over_omega:
            a = self.alpha(delta_over_omega)
            var += 2.0 * float((a @ self.m_mat.conj() @ a).real)
            var += 2.0 * float((a @ self.n_mat @ np.conj(a)).real)
            var += float(np.sum(np.abs(a) ** 2))
        return var / 9.0

    def photon_current(self, delta_over_omega: float = 0.0) -> float:
        """Chiral order parameter i [sum_n a_n^dag a_{n+1} - h.c.]."""
        z = 0.0 + 0.0j
        a = self.alpha(delta_over_omega) if delta_over_omega else np.zeros(3, dtype=complex)
        for n in range(3):
            nxt = (n + 1) % 3
            z += self.n_mat[n, nxt] + np.conj(a[n]) * a[nxt]
        return float(-2.0 * z.imag)


def momentum_state(modes: MomentumModes, disp: Displacement | None = None) -> GaussianCavityState:
    """Fourier-assembled Gaussian state for the translation-invariant phases."""
    mu, nu, q = modes.mu_q, modes.nu_q, modes.q
    phase = np.exp(1j * np.outer(_SITES, q))
    u = (np.conj(phase) * nu) / math.sqrt(3.0)
    v = (phase * mu) / math.sqrt(3.0)
    alpha = disp.alpha_tilde if disp is not None else np.zeros(3, dtype=complex)
    return GaussianCavityState(U=u, V=v, alpha_tilde=alpha)


def transform_state(sol: SymplecticSolution, disp: Displacement) -> GaussianCavityState:
    """Gaussian state from the 6x6 symplectic solution."""
    return GaussianCavityState(U=sol.U.copy(), V=sol.V.copy(), alpha_tilde=disp.alpha_tilde)


def state_for(params: ModelParams, kind: PhaseKind, warm: Displacement | None = None):
    """(state, displacement, eps_ascending) for a given phase branch."""
    if kind == PhaseKind.NP:
        modes = np_modes(params)
        return momentum_state(modes), zero_displacement(), np.sort(modes.eps_q)
    if kind == PhaseKind.FSP:
        modes = fsp_modes(params)
        disp = fsp_displacement(params)
        return momentum_state(modes, disp), disp, np.sort(modes.eps_q)
    disp = csp_displacement(params, seeds=[warm] if warm is not None else None)
    sol = symplectic_diagonalize(build_csp_matrix(params, disp), params.omega)
    return transform_state(sol, disp), disp, sol.eps


# -- truncated variances as printed in the source formulas --------------------


def printed_variance_momentum(modes: MomentumModes) -> float:
    """(2/9)(mu_0^2 nu_0^2 + mu_{2pi/3}^2 nu_{2pi/3}^2): drops the pair weight."""
    mu2nu2 = (modes.mu_q * modes.nu_q) ** 2
    return float(2.0 / 9.0 * (mu2nu2[0] + mu2nu2[1]))


def printed_variance_fsp(modes: MomentumModes, alpha1_sq: float) -> float:
    """Uniform-branch printed denominator divided by 9."""
    mu2nu2 = (modes.mu_q * modes.nu_q) ** 2
    nu2 = modes.nu_q**2
    return float(
        (2.0 * (mu2nu2[0] + mu2nu2[1]) + 6.0 * (nu2[0] + 2.0 * nu2[1]) + 9.0 * alpha1_sq)
        / 9.0
    )


def printed_variance_transform(t: np.ndarray, alpha1: complex, site: int = 0) -> float:
    """Literal transcription of the single-cavity second-moment polynomial.

    Agrees with the Wick expansion; kept as an independent cross-check.
    """
    r = t[site, :]
    a = alpha1
    aa = abs(a) ** 2
    n2 = (
        aa**2
        + abs(r[0]) ** 4
        + 3 * aa * abs(r[0]) ** 2
        + 2 * abs(r[0]) ** 2 * abs(r[1]) ** 2
        + 2 * abs(r[0]) ** 2 * abs(r[2]) ** 2
        + 2 * abs(r[0]) ** 2 * abs(r[3]) ** 2
        + abs(r[0]) ** 2 * abs(r[4]) ** 2
        + abs(r[0]) ** 2 * abs(r[5]) ** 2
        + (r[0] * r[3] * np.conj(r[1]) * np.conj(r[4])).real * 2.0
        + (r[0] * r[3] * np.conj(r[2]) * np.conj(r[5])).real * 2.0
        + (a**2 * r[0] * r[3]).real * 2.0
        + abs(r[1]) ** 4
        + 3 * aa * abs(r[1]) ** 2
        + 2 * abs(r[1]) ** 2 * abs(r[2]) ** 2
        + abs(r[1]) ** 2 * abs(r[3]) ** 2
        + 2 * abs(r[1]) ** 2 * abs(r[4]) ** 2
        + abs(r[1]) ** 2 * abs(r[5]) ** 2
        + (r[1] * r[4] * np.conj(r[2]) * np.conj(r[5])).real * 2.0
        + (a**2 * r[1] * r[4]).real * 2.0
        + abs(r[2]) ** 4
        + 3 * aa * abs(r[2]) ** 2
        + abs(r[2]) ** 2 * abs(r[3]) ** 2
        + abs(r[2]) ** 2 * abs(r[4]) ** 2
        + 2 * abs(r[2]) ** 2 * abs(r[5]) ** 2
        + (a**2 * r[2] * r[5]).real * 2.0
        + aa * abs(r[3]) ** 2
        + aa * abs(r[4]) ** 2
        + aa * abs(r[5]) ** 2
    )
    mean = abs(r[0]) ** 2 + abs(r[1]) ** 2 + abs(r[2]) ** 2 + aa
    return float(n2 - mean**2)


# -- photon-number results -----------------------------------------------------


@dataclass
class PhotonNumberResult:
    """Measured-cavity photon statistics, full and fluctuation-sector."""

    phase: PhaseLabel
    n1_mean: float
    n1_var: float
    n1_mean_fluct: float
    n1_var_fluct: float
    collective_mean_fluct: float
    collective_var_fluct: float
    site: int = 0
    printed_variance: float | None = None
    divergent: bool = False


@dataclass
class MeasurementResult:
    """Photon-number measurement precision against the QFI bound."""

    n1_mean: float
    n1_var: float
    inv_variance: float
    qcrb_ratio: float
    qfi_value: float
    phase: PhaseLabel
    extras: dict = field(default_factory=dict)


def photon_number(
    params: ModelParams,
    kind: PhaseKind | None = None,
    warm: Displacement | None = None,
) -> PhotonNumberResult:
    """Mean and variance of the first-cavity photon number.

    Full values include the mean-field part, which scales with delta/omega;
    the fluctuation-sector values are gap-independent.
    """
    if kind is None:
        kind = classify_phase(params).kind
    label = PhaseLabel(kind, 0.0)
    state, disp, _ = state_for(params, kind, warm)
    dow = params.delta_over_omega
    printed = None
    if kind == PhaseKind.NP:
        printed = printed_variance_momentum(np_modes(params))
        label = classify_phase(params)
    elif kind == PhaseKind.FSP:
        a1sq = float(abs(state.alpha(dow)[0]) ** 2)
        printed = printed_variance_fsp(fsp_modes(params), a1sq)
    return PhotonNumberResult(
        phase=label,
        n1_mean=state.n_mean(0, dow),
        n1_var=state.n_var(0, dow),
        n1_mean_fluct=state.n_mean(0, 0.0),
        n1_var_fluct=state.n_var(0, 0.0),
        collective_mean_fluct=state.collective_mean(0.0),
        collective_var_fluct=state.collective_var(0.0),
        printed_variance=printed,
    )


def _with_g1(params: ModelParams, g1: float) -> ModelParams:
    return ModelParams(params.omega, params.delta, params.j_hop, params.theta, g1)


def inverted_variance(
    params: ModelParams,
    kind: PhaseKind | None = None,
    h: float | None = None,
    warm: Displacement | None = None,
) -> MeasurementResult:
    """Error-propagation precision of the photon-number measurement.

    The headline inverted variance uses the collective fluctuation sector,
    F = (d<N>/dg1)^2 / Var(N), with the derivative taken by central
    differences and the displacement re-solved at the shifted couplings.
    """
    if params.g1 <= 0.0:
        raise ZeroVariance("photon-number variance vanishes at g1 = 0")
    if kind is None:
        kind = classify_phase(params).kind
    if h is None:
        h = fd_step(params)

    state_c, disp_c, _ = state_for(params, kind, warm)
    states = {}
    for sgn in (+1, -1):
        p = _with_g1(params, params.g1 + sgn * h)
        states[sgn] = state_for(p, kind, disp_c)[0]

    dow = params.delta_over_omega

    def fd(getter) -> float:
        return (getter(states[+1]) - getter(states[-1])) / (2.0 * h)

    var_c = state_c.collective_var(0.0)
    if var_c <= 0.0:
        raise ZeroVariance("collective photon-number variance vanished")
    d_coll = fd(lambda s: s.collective_mean(0.0))
    f_primary = d_coll**2 / var_c

    if kind == PhaseKind.NP:
        qres = qfi_np(params)
    elif kind == PhaseKind.FSP:
        qres = qfi_fsp(params)
    else:
        qres = qfi_csp(params, disp=disp_c, kind=kind)

    extras = {
        "F_cavity1_fluct": fd(lambda s: s.n_mean(0, 0.0)) ** 2 / state_c.n_var(0, 0.0),
        "F_collective_full": fd(lambda s: s.collective_mean(dow)) ** 2
        / state_c.collective_var(dow),
        "F_cavity1_full": fd(lambda s: s.n_mean(0, dow)) ** 2 / state_c.n_var(0, dow),
        "fd_step": h,
    }
    if kind == PhaseKind.NP:
        printed = printed_variance_momentum(np_modes(params))
        extras["F_printed"] = fd(lambda s: s.collective_mean(0.0)) ** 2 / printed
        extras["printed_variance_deficit"] = var_c - printed
    elif kind == PhaseKind.FSP:
        a1sq = float(abs(state_c.alpha(dow)[0]) ** 2)
        printed = printed_variance_fsp(fsp_modes(params), a1sq)
        num_full = fd(lambda s: s.collective_mean(dow))
        extras["F_printed"] = num_full**2 / printed
        extras["printed_variance_deficit"] = state_c.collective_var(dow) - printed

    ratio = f_primary / qres.value if math.isfinite(qres.value) else 0.0
    return MeasurementResult(
        n1_mean=state_c.n_mean(0, dow),
        n1_var=state_c.n_var(0, dow),
        inv_variance=f_primary,
        qcrb_ratio=ratio,
        qfi_value=qres.value,
        phase=qres.phase,
        extras=extras,
    )
