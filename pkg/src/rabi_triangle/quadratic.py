"""Diagonalization of the quadratic effective Hamiltonians.

Two routes are provided.  In the normal and uniform superradiant phases the
Hamiltonian is translation invariant, so a momentum-space Bogoliubov rotation
with a single squeezing parameter per (q, -q) sector diagonalizes it.  In the
chiral/frustrated phases the dressed gaps differ between cavities and the
full 6x6 symplectic eigenproblem of Lambda_- M must be solved, where M is the
Hermitian coefficient matrix of the quadratic form and Lambda_- carries the
bosonic metric diag(+1,+1,+1,-1,-1,-1).

Convention fixed against the truncated-Fock oracle: the physical excitation
energies are twice the positive eigenvalues of Lambda_- M, and the vacuum
constant of the quadratic form (relative to the displaced frame) is
sum_n (eps_n - omega) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DynamicalInstability, GapClosed
from .meanfield import Displacement, fsp_displacement, zero_displacement
from .model import ModelParams, Q_VALUES, TWO_PI_3

#: Gaps below this (in units of omega) count as closed: squeezing overflows.
GAP_TOL = 1e-12

LAMBDA_MINUS = np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])


@dataclass
class MomentumModes:
    """Bogoliubov data per quasimomentum, ordered as Q_VALUES = (0, +2pi/3, -2pi/3)."""

    q: np.ndarray
    omega_q: np.ndarray
    xi_q: np.ndarray
    eps_q: np.ndarray
    e_const_q: np.ndarray
    kappa: float

    @property
    def mu_q(self) -> np.ndarray:
        return np.cosh(self.xi_q)

    @property
    def nu_q(self) -> np.ndarray:
        return np.sinh(self.xi_q)

    @property
    def pair_sum(self) -> np.ndarray:
        """omega_q + omega_{-q} for each q."""
        return self.omega_q + self.omega_q[[0, 2, 1]]

    @property
    def ground_const(self) -> float:
        """Vacuum constant of the quadratic form, sum_q E_q."""
        return float(np.sum(self.e_const_q))

    def eps_of_q(self, q: float) -> float:
        idx = int(np.argmin(np.abs(self.q - q)))
        return float(self.eps_q[idx])

    def eps_min(self) -> float:
        return float(np.min(self.eps_q))


def _bogoliubov_modes(omega: float, j_hop: float, theta: float, kappa: float) -> MomentumModes:
    q = np.array(Q_VALUES)
    w_q = omega - 2.0 * kappa + 2.0 * j_hop * np.cos(theta - q)
    w_mq = omega - 2.0 * kappa + 2.0 * j_hop * np.cos(theta + q)
    s = w_q + w_mq
    gap_arg = s - 4.0 * kappa
    if np.any(gap_arg <= GAP_TOL * omega):
        raise GapClosed(
            f"soft-mode gap closed: min(S_q - 4 kappa) = {float(np.min(gap_arg)):.3e}"
        )
    xi = 0.25 * np.log((s + 4.0 * kappa) / gap_arg)
    root = np.sqrt(s**2 - 16.0 * kappa**2)
    eps = 0.5 * (root + w_q - w_mq)
    e_const = 0.25 * (root - s)
    return MomentumModes(q=q, omega_q=w_q, xi_q=xi, eps_q=eps, e_const_q=e_const, kappa=kappa)


def np_modes(params: ModelParams) -> MomentumModes:
    """Excitation modes of the normal phase (anomalous coefficient g1^2 omega)."""
    return _bogoliubov_modes(params.omega, params.j_hop, params.theta, params.g1**2 * params.omega)


def fsp_kappa(params: ModelParams) -> float:
    """Anomalous coefficient lambda'^2/Delta' of the uniform superradiant branch.

    Delta-independent closed form, (omega + 2J cos theta)^3 / (64 g1^4 omega^2).
    """
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    return (w + 2.0 * j * math.cos(th)) ** 3 / (64.0 * g1**4 * w**2)


def fsp_modes(params: ModelParams) -> MomentumModes:
    """Excitation modes on the uniform superradiant branch."""
    return _bogoliubov_modes(params.omega, params.j_hop, params.theta, fsp_kappa(params))


def build_csp_matrix(params: ModelParams, disp: Displacement) -> np.ndarray:
    """Hermitian 6x6 coefficient matrix M of the displaced quadratic form.

    At zero displacement every kappa_n equals g1^2 omega and M reproduces the
    normal-phase quadratic form.
    """
    w, j, th = params.omega, params.j_hop, params.theta
    kap = disp.kappa(params)
    hop = 0.5 * j * np.exp(1j * th)
    m = np.zeros((6, 6), dtype=complex)
    for n in range(3):
        m[n, n] = 0.5 * w - kap[n]
        m[n + 3, n + 3] = 0.5 * w - kap[n]
        m[n, n + 3] = -kap[n]
        m[n + 3, n] = -kap[n]
        nxt = (n + 1) % 3
        # photon hopping, e^{+i theta} along n -> n+1
        m[nxt, n] = hop
        m[n, nxt] = np.conj(hop)
        m[n + 3, nxt + 3] = hop
        m[nxt + 3, n + 3] = np.conj(hop)
    return m


@dataclass
class SymplecticSolution:
    """Bogoliubov transform and spectrum of a 6x6 quadratic form.

    T maps the normal-mode operators onto the cavity ones and preserves the
    bosonic metric, T Lambda_- T^dagger = Lambda_-.  eps holds the three
    physical excitation energies in ascending order and e_ground the vacuum
    constant of the quadratic form.
    """

    T: np.ndarray
    eps: np.ndarray
    e_ground: float

    @property
    def U(self) -> np.ndarray:
        return self.T[:3, :3]

    @property
    def V(self) -> np.ndarray:
        return self.T[:3, 3:]

    def symplectic_defect(self) -> float:
        return float(
            np.max(np.abs(self.T @ LAMBDA_MINUS @ self.T.conj().T - LAMBDA_MINUS))
        )


def symplectic_diagonalize(
    m: np.ndarray,
    omega: float,
    imag_tol: float = 1e-9,
    check_tol: float = 1e-8,
) -> SymplecticSolution:
    """Diagonalize the bosonic quadratic form given by the Hermitian matrix M.

    Eigenvalues of Lambda_- M come in +/- pairs; the positive triple is kept,
    each eigenvector normalized to symplectic norm +1 and the conjugate
    partners placed in the last three columns, so that T has the standard
    [[U, V], [V*, U*]] block structure.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (6, 6):
        raise ValueError("expected a 6x6 matrix")
    herm_defect = float(np.max(np.abs(m - m.conj().T)))
    if herm_defect > 1e-12 * max(1.0, float(np.max(np.abs(m)))):
        raise ValueError(f"matrix is not Hermitian (defect {herm_defect:.2e})")

    scale = float(np.max(np.abs(m)))
    vals, vecs = scipy.linalg.eig(LAMBDA_MINUS @ m)
    if float(np.max(np.abs(vals.imag))) > imag_tol * max(1.0, scale):
        raise DynamicalInstability(
            f"complex eigenvalues of the symplectic form: max imag {float(np.max(np.abs(vals.imag))):.3e}"
        )
    revals = vals.real
    order = np.argsort(revals)
    neg_idx, pos_idx = order[:3], order[3:]
    pos_sorted = pos_idx[np.argsort(revals[pos_idx])]
    neg_sorted = neg_idx[np.argsort(-revals[neg_idx])]
    # pairing check: smallest positive against least-negative, etc.
    pair_defect = float(np.max(np.abs(revals[pos_sorted] + revals[neg_sorted])))
    if pair_defect > 1e-8 * max(1.0, scale):
        raise DynamicalInstability(
            f"eigenvalues do not come in +/- pairs (defect {pair_defect:.3e})"
        )
    eps_matrix = revals[pos_sorted]
    if np.any(eps_matrix <= 0.5 * GAP_TOL * omega):
        raise GapClosed("zero symplectic eigenvalue: gap closed")

    cols = []
    for k, idx in enumerate(pos_sorted):
        u = vecs[:, idx].astype(complex)
        # symplectic Gram-Schmidt against previously accepted degenerate columns
        for prev_eps, prev_u in zip(eps_matrix[:k], cols):
            if abs(eps_matrix[k] - prev_eps) < 1e-8 * max(1.0, scale):
                u = u - (prev_u.conj() @ (LAMBDA_MINUS @ u)) * prev_u
        norm = float((u.conj() @ (LAMBDA_MINUS @ u)).real)
        if norm <= 0.0:
            raise DynamicalInstability(
                "positive eigenvalue with nonpositive symplectic norm"
            )
        u = u / math.sqrt(norm)
        # deterministic phase: largest component real positive
        pivot = int(np.argmax(np.abs(u)))
        phase = u[pivot] / abs(u[pivot])
        u = u / phase
        cols.append(u)

    t = np.zeros((6, 6), dtype=complex)
    for k, u in enumerate(cols):
        t[:, k] = u
        t[:3, k + 3] = np.conj(u[3:])
        t[3:, k + 3] = np.conj(u[:3])

    sol = SymplecticSolution(T=t, eps=2.0 * eps_matrix, e_ground=float(np.sum(2.0 * eps_matrix - omega)) / 2.0)
    defect = sol.symplectic_defect()
    if defect > check_tol:
        raise DynamicalInstability(f"symplectic normalization failed (defect {defect:.3e})")
    return sol


def csp_modes(params: ModelParams, disp: Displacement) -> SymplecticSolution:
    """Displaced-frame normal modes from the 6x6 route."""
    return symplectic_diagonalize(build_csp_matrix(params, disp), params.omega)


def momentum_ground_energy(params: ModelParams, phase_kind) -> float:
    """Full ground energy (including the qubit constant) on the momentum route.

    Normal phase: -3 Delta/2 - 3 g1^2 omega + sum_q E_q.  Uniform branch:
    displacement energy plus dressed-gap constant plus sum_q E'_q.
    """
    from .model import PhaseKind

    w, j, th = params.omega, params.j_hop, params.theta
    if phase_kind == PhaseKind.NP:
        modes = np_modes(params)
        return -1.5 * params.delta - 3.0 * params.g1**2 * w + modes.ground_const
    if phase_kind == PhaseKind.FSP:
        modes = fsp_modes(params)
        disp = fsp_displacement(params)
        amp2 = float(disp.a_tilde[0]) ** 2
        e0 = 3.0 * (params.delta / w) * amp2 * (w + 2.0 * j * math.cos(th))
        dressed = disp.delta_n(params)[0]
        return e0 - 1.5 * dressed + modes.ground_const
    raise ValueError("momentum route only covers the NP and the uniform branch")
