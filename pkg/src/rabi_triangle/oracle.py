"""Brute-force oracles: truncated-Fock exact diagonalization and Gaussian overlaps.

The full-model oracle diagonalizes the three-cavity, three-qubit Hamiltonian
at finite delta/omega in a (optionally displaced) Fock basis and provides
independent ground truth for energies, observables and fidelity-based QFI.
The Gaussian-overlap oracle computes the QFI of the effective quadratic
family from Bogoliubov-transform overlaps alone, independent of the
perturbative mode sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import DegenerateGroundState, DimensionTooLarge
from .meanfield import Displacement, csp_displacement, fsp_displacement, zero_displacement
from .model import ModelParams, PhaseKind, classify_phase
from .quadratic import LAMBDA_MINUS, build_csp_matrix, symplectic_diagonalize
from .qfi import fd_step


@dataclass
class FockConfig:
    """Truncated-Fock basis configuration for the full-model oracle.

    n_max counts photons per cavity around the (optional) displaced frame;
    bias adds a small symmetry-breaking field eps_b * sum_n sigma_n^x to pick
    one parity branch deterministically in the superradiant region.
    """

    n_max: int = 8
    displaced_frame: Displacement | None = None
    bias: float = 0.0
    dim_limit: int = 400_000

    def dimension(self) -> int:
        return (self.n_max + 1) ** 3 * 8

    def check_dimension(self):
        dim = self.dimension()
        if self.n_max < 1:
            raise DimensionTooLarge("n_max must be at least 1")
        if dim > self.dim_limit:
            raise DimensionTooLarge(
                f"Hilbert dimension {dim} exceeds the limit {self.dim_limit}"
            )


@dataclass
class EdResult:
    e0: float
    gap: float
    n1: float
    photon_current: float
    converged: bool | None = None


def _boson_destroy(n_max: int) -> sp.csr_matrix:
    data = np.sqrt(np.arange(1, n_max + 1, dtype=float))
    return sp.diags(data, offsets=1, format="csr")


def _site_ops(cfg: FockConfig, params: ModelParams):
    """Cavity annihilation (frame-shifted) and qubit Pauli operators per site."""
    nb = cfg.n_max + 1
    a = _boson_destroy(cfg.n_max)
    ident_b = sp.identity(nb, format="csr")
    sx = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    sz = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
    ident_q = sp.identity(2, format="csr")

    alpha = (
        cfg.displaced_frame.alpha(params)
        if cfg.displaced_frame is not None
        else np.zeros(3, dtype=complex)
    )

    def embed_boson(op, site):
        mats = [ident_b] * 3
        mats[site] = op
        out = mats[0]
        for m_ in mats[1:]:
            out = sp.kron(out, m_, format="csr")
        return sp.kron(out, sp.identity(8, format="csr"), format="csr")

    def embed_qubit(op, site):
        mats = [ident_q] * 3
        mats[site] = op
        out = mats[0]
        for m_ in mats[1:]:
            out = sp.kron(out, m_, format="csr")
        return sp.kron(sp.identity(nb**3, format="csr"), out, format="csr")

    dim = nb**3 * 8
    ones = sp.identity(dim, format="csr", dtype=complex)
    a_ops = [embed_boson(a, s).astype(complex) + alpha[s] * ones for s in range(3)]
    sx_ops = [embed_qubit(sx, s).astype(complex) for s in range(3)]
    sz_ops = [embed_qubit(sz, s).astype(complex) for s in range(3)]
    return a_ops, sx_ops, sz_ops


def build_hamiltonian(params: ModelParams, cfg: FockConfig) -> sp.csr_matrix:
    """Full-model Hamiltonian on the truncated (displaced) Fock basis."""
    cfg.check_dimension()
    a_ops, sx_ops, sz_ops = _site_ops(cfg, params)
    w, d, j, th, g = params.omega, params.delta, params.j_hop, params.theta, params.g
    h = None
    for n in range(3):
        an = a_ops[n]
        term = (
            w * (an.getH() @ an)
            + 0.5 * d * sz_ops[n]
            + g * ((an.getH() + an) @ sx_ops[n])
        )
        nxt = (n + 1) % 3
        hop = j * np.exp(1j * th) * (an.getH() @ a_ops[nxt])
        term = term + hop + hop.getH()
        if cfg.bias:
            term = term + cfg.bias * sx_ops[n]
        h = term if h is None else h + term
    return h.tocsr()


def ground_state(h: sp.spmatrix, k: int = 2):
    """Lowest eigenpair and gap by sparse iteration."""
    k = min(k, h.shape[0] - 2)
    vals, vecs = eigsh(h, k=max(k, 2), which="SA")
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    return float(vals[0]), float(vals[1] - vals[0]), vecs[:, 0]


def photon_current_operator(params: ModelParams, cfg: FockConfig) -> sp.csr_matrix:
    a_ops, _, _ = _site_ops(cfg, params)
    z = None
    for n in range(3):
        t = a_ops[n].getH() @ a_ops[(n + 1) % 3]
        z = t if z is None else z + t
    return (1j * (z - z.getH())).tocsr()


def photon_current(state: np.ndarray, params: ModelParams, cfg: FockConfig) -> float:
    """Expectation of i[(a1^dag a2 + a2^dag a3 + a3^dag a1) - h.c.]."""
    op = photon_current_operator(params, cfg)
    return float((state.conj() @ (op @ state)).real)


def number_operator(params: ModelParams, cfg: FockConfig, site: int = 0) -> sp.csr_matrix:
    a_ops, _, _ = _site_ops(cfg, params)
    return (a_ops[site].getH() @ a_ops[site]).tocsr()


def ed_point(params: ModelParams, cfg: FockConfig, check_convergence: bool = False) -> EdResult:
    """Ground-state summary at one parameter point."""
    h = build_hamiltonian(params, cfg)
    e0, gap, vec = ground_state(h)
    n1_op = number_operator(params, cfg)
    n1 = float((vec.conj() @ (n1_op @ vec)).real)
    iph = photon_current(vec, params, cfg)
    converged = None
    if check_convergence:
        cfg2 = FockConfig(cfg.n_max + 2, cfg.displaced_frame, cfg.bias, cfg.dim_limit)
        e0_2, _, _ = ground_state(build_hamiltonian(params, cfg2))
        converged = abs(e0 - e0_2) < 1e-6 * max(1.0, abs(e0))
    return EdResult(e0=e0, gap=gap, n1=n1, photon_current=iph, converged=converged)


def qfi_fidelity(params: ModelParams, cfg: FockConfig, delta: float) -> float:
    """Fidelity-based QFI, 8 (1 - |<psi(g1-d)|psi(g1+d)>|) / (2 d)^2.

    Both states are expressed in the same (frame-fixed) truncated basis.
    Raises DegenerateGroundState when the gap is too small to define the
    ground-state family, unless a parity bias or displaced frame is set.
    """
    states = []
    for sgn in (-1, +1):
        p = ModelParams(params.omega, params.delta, params.j_hop, params.theta, params.g1 + sgn * delta)
        h = build_hamiltonian(p, cfg)
        e0, gap, vec = ground_state(h)
        if gap < 1e-10 * max(1.0, abs(e0)) and cfg.bias == 0.0 and cfg.displaced_frame is None:
            raise DegenerateGroundState(
                f"gap {gap:.3e} too small for a fidelity derivative at g1={p.g1}"
            )
        states.append(vec)
    overlap = abs(np.vdot(states[0], states[1]))
    return float(8.0 * (1.0 - overlap) / (2.0 * delta) ** 2)


# -- quadratic-model oracles ----------------------------------------------------


def quadratic_fock_hamiltonian(params: ModelParams, disp: Displacement, n_max: int) -> sp.csr_matrix:
    """Displaced-frame quadratic Hamiltonian on a 3-boson Fock basis.

    Independent route to the excitation energies and the vacuum constant of
    the quadratic form (no qubits, no mean-field constant).
    """
    nb = n_max + 1
    if nb**3 > 100_000:
        raise DimensionTooLarge("quadratic Fock basis too large")
    a = _boson_destroy(n_max)
    ident = sp.identity(nb, format="csr")

    def embed(op, site):
        mats = [ident] * 3
        mats[site] = op
        out = mats[0]
        for m_ in mats[1:]:
            out = sp.kron(out, m_, format="csr")
        return out.astype(complex)

    a_ops = [embed(a, s) for s in range(3)]
    kap = disp.kappa(params)
    w, j, th = params.omega, params.j_hop, params.theta
    h = None
    for n in range(3):
        an = a_ops[n]
        x = an.getH() + an
        term = w * (an.getH() @ an) - kap[n] * (x @ x)
        hop = j * np.exp(1j * th) * (an.getH() @ a_ops[(n + 1) % 3])
        term = term + hop + hop.getH()
        h = term if h is None else h + term
    return h.tocsr()


def gaussian_overlap_qfi(
    params: ModelParams,
    delta: float | None = None,
    kind: PhaseKind | None = None,
    warm: Displacement | None = None,
    displacement: str = "explicit",
) -> float:
    """QFI of the effective quadratic family from Gaussian-state overlaps.

    For two Bogoliubov vacua related by T_rel = T1^{-1} T2 the overlap is
    |det U_rel|^{-1/2} with U_rel the annihilator block; the QFI follows by
    the central fidelity difference.  Uses only the symplectic transform,
    so it is independent of the perturbative QFI expressions.

    ``displacement`` selects the family differentiated on the chiral and
    frustrated branches: "explicit" freezes the mean-field amplitudes at the
    central point (the convention of the perturbative sums), "resolved"
    re-solves them at the shifted couplings.
    """
    if kind is None:
        kind = classify_phase(params).kind
    if delta is None:
        delta = fd_step(params)
    frozen = None
    if displacement == "explicit" and kind in (PhaseKind.CSP, PhaseKind.FASP):
        frozen = csp_displacement(params, seeds=[warm] if warm is not None else None)

    def transform_at(g1: float) -> np.ndarray:
        p = ModelParams(params.omega, params.delta, params.j_hop, params.theta, g1)
        if kind == PhaseKind.NP:
            d = zero_displacement()
        elif kind == PhaseKind.FSP:
            d = fsp_displacement(p)
        elif frozen is not None:
            d = frozen
        else:
            d = csp_displacement(p, seeds=[warm] if warm is not None else None)
        return symplectic_diagonalize(build_csp_matrix(p, d), p.omega).T

    t1 = transform_at(params.g1 - delta)
    t2 = transform_at(params.g1 + delta)
    t1_inv = LAMBDA_MINUS @ t1.conj().T @ LAMBDA_MINUS
    u_rel = (t1_inv @ t2)[:3, :3]
    overlap = float(abs(np.linalg.det(u_rel)) ** -0.5)
    return float(8.0 * (1.0 - overlap) / (2.0 * delta) ** 2)


# -- oracle comparison driver ----------------------------------------------------


@dataclass
class OracleRow:
    theta: float
    g1: float
    delta_over_omega: float
    qfi_formula: float
    qfi_ed: float
    rel_err_qfi: float
    gap_formula: float
    gap_ed: float
    rel_err_gap: float
    status: str = "ok"


def oracle_compare(
    params_list: list[ModelParams],
    n_max: int = 8,
    fd_delta: float = 2e-3,
    bias_scale: float = 1e-6,
) -> list[OracleRow]:
    """Formula-vs-ED comparison rows for a list of parameter points."""
    from .qfi import qfi_fsp, qfi_np
    from .quadratic import fsp_modes, np_modes

    rows = []
    for p in params_list:
        status = "ok"
        try:
            label = classify_phase(p)
        except Exception:
            label = None
            status = "boundary"
        if p.g1 == 0.0:
            rows.append(OracleRow(p.theta, p.g1, p.delta_over_omega, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
            continue
        frame = None
        bias = 0.0
        if label is not None and label.kind != PhaseKind.NP:
            status = "sp-displaced-frame"
            if label.kind == PhaseKind.FSP:
                frame = fsp_displacement(p)
            else:
                frame = csp_displacement(p)
            bias = bias_scale * p.delta
        cfg = FockConfig(n_max=n_max, displaced_frame=frame, bias=bias)
        if label is not None and label.kind == PhaseKind.NP:
            formula = qfi_np(p).value
            gap_f = np_modes(p).eps_min()
        elif label is not None and label.kind == PhaseKind.FSP:
            formula = qfi_fsp(p).value
            gap_f = fsp_modes(p).eps_min()
        else:
            formula = math.nan
            gap_f = math.nan
        try:
            ed_qfi = qfi_fidelity(p, cfg, fd_delta)
            _, gap_ed, _ = ground_state(build_hamiltonian(p, cfg))
        except Exception as exc:
            rows.append(
                OracleRow(p.theta, p.g1, p.delta_over_omega, formula, math.nan, math.nan,
                          gap_f, math.nan, math.nan, status=f"error:{type(exc).__name__}")
            )
            continue
        rel_q = abs(ed_qfi - formula) / abs(formula) if formula else math.nan
        rel_g = abs(gap_ed - gap_f) / abs(gap_f) if gap_f else math.nan
        rows.append(
            OracleRow(p.theta, p.g1, p.delta_over_omega, formula, ed_qfi, rel_q,
                      gap_f, gap_ed, rel_g, status=status)
        )
    return rows
