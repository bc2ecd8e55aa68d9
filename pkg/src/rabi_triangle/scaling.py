"""Parameter sweeps, power-law exponent fits and Heisenberg-limit verdicts.

Distances to the critical point are measured in the normalized coordinates
g1/g1c - 1 and theta/theta_c + 1, so fitted exponents are directly comparable
across sweeps.  Chiral-branch rows are solved in order of decreasing distance
and warm-start the mean-field solver from the neighbouring row, which keeps
one solution branch along the sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, InsufficientPoints
from .meanfield import Displacement
from .model import (
    ModelParams,
    PhaseKind,
    classify_phase,
    critical_theta,
    min_boundary,
    soft_pair_q,
)
from .observables import inverted_variance, state_for
from .qfi import qfi_csp, qfi_fsp, qfi_np
from .quadratic import fsp_modes, np_modes

SWEEP_COLUMNS = ("x", "distance", "phase", "I", "N1", "var_N1", "F", "ratio", "eps_soft", "status")


@dataclass
class SweepRow:
    x: float
    distance: float
    phase: str
    qfi: float
    n1: float
    var_n1: float
    inv_var: float
    ratio: float
    eps_soft: float
    status: str = "ok"

    def as_tuple(self):
        return (
            self.x,
            self.distance,
            self.phase,
            self.qfi,
            self.n1,
            self.var_n1,
            self.inv_var,
            self.ratio,
            self.eps_soft,
            self.status,
        )


@dataclass
class SweepTable:
    axis: str
    control: dict
    critical: dict
    rows: list[SweepRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        key = {
            "I": "qfi",
            "N1": "n1",
            "var_N1": "var_n1",
            "F": "inv_var",
            "ratio": "ratio",
            "eps_soft": "eps_soft",
            "x": "x",
            "distance": "distance",
        }[name]
        return np.array([getattr(r, key) for r in self.rows], dtype=float)

    def ok_mask(self) -> np.ndarray:
        return np.array([r.status == "ok" for r in self.rows], dtype=bool)


def _phase_for_branch(branch: str, params: ModelParams) -> PhaseKind:
    return {
        "np": PhaseKind.NP,
        "fsp": PhaseKind.FSP,
        "csp": PhaseKind.CSP,
        "fasp": PhaseKind.FASP,
    }[branch]


def _soft_eps(params: ModelParams, kind: PhaseKind, eps_sorted: np.ndarray) -> float:
    """Gap of the branch's soft sector.

    In the normal phase this is keyed to the quasimomentum whose boundary is
    (or will be) crossed: the q = 0 sector gap when the uniform branch is the
    relevant instability, otherwise the soft member of the |q| = 2pi/3 pair.
    """
    if kind == PhaseKind.NP:
        modes = np_modes(params)
        _, soft = min_boundary(params.theta, params.omega, params.j_hop)
        return modes.eps_of_q(soft)
    if kind == PhaseKind.FSP:
        return fsp_modes(params).eps_of_q(0.0)
    return float(eps_sorted[0])


def _np_soft_eps_for_branch(params: ModelParams, branch: str) -> float:
    """Normal-phase soft gap when a branch override pins the soft sector."""
    modes = np_modes(params)
    if branch == "fsp":
        return modes.eps_of_q(0.0)
    if branch in ("csp", "fasp"):
        return modes.eps_of_q(soft_pair_q(params.theta))
    _, soft = min_boundary(params.theta, params.omega, params.j_hop)
    return modes.eps_of_q(soft)


def sweep(
    params: ModelParams,
    axis: str = "g1",
    x_range: tuple[float, float] = (0.0, 0.0),
    n_points: int = 20,
    spacing: str = "log-distance",
    branch: str = "auto",
    critical: float | None = None,
    include_measurement: bool = True,
) -> SweepTable:
    """Evaluate observables along one axis.

    For log-distance spacing the range endpoints must lie strictly on one
    side of the critical value; the points are then log-spaced in normalized
    distance.  Failed rows are flagged in the status column, never dropped.
    """
    if axis not in ("g1", "theta"):
        raise DomainError(f"unknown sweep axis {axis!r}")
    if critical is None:
        if axis == "g1":
            critical, _ = min_boundary(params.theta, params.omega, params.j_hop)
        else:
            th_c = critical_theta(params.omega, params.j_hop)
            critical = -th_c if (x_range[0] + x_range[1]) / 2.0 < 0 else th_c

    lo, hi = float(x_range[0]), float(x_range[1])
    if spacing == "log-distance":
        d_lo = (lo - critical) / abs(critical)
        d_hi = (hi - critical) / abs(critical)
        if d_lo == 0.0 or d_hi == 0.0 or (d_lo > 0) != (d_hi > 0):
            raise DomainError("log-distance range must sit strictly on one side of the critical value")
        sign = 1.0 if d_lo > 0 else -1.0
        dists = np.geomspace(abs(d_lo), abs(d_hi), n_points)
        xs = critical + sign * dists * abs(critical)
    elif spacing == "linear":
        if n_points < 1:
            raise DomainError("need at least one sweep point")
        xs = np.linspace(lo, hi, n_points)
    else:
        raise DomainError(f"unknown spacing {spacing!r}")

    # chiral-branch rows are solved far-to-near so warm starts stay on branch
    order = np.argsort(-np.abs((xs - critical) / critical))

    rows_by_index: dict[int, SweepRow] = {}
    warm: Displacement | None = None
    for idx in order:
        x = float(xs[idx])
        p = ModelParams(
            params.omega,
            params.delta,
            params.j_hop,
            x if axis == "theta" else params.theta,
            params.g1 if axis == "theta" else x,
        )
        distance = abs((x - critical) / critical)
        try:
            if branch == "auto":
                kind = classify_phase(p).kind
                phase_name = kind.value
            else:
                kind = _phase_for_branch(branch, p)
                phase_name = kind.value
            state, disp, eps_sorted = state_for(p, kind, warm)
            if kind in (PhaseKind.CSP, PhaseKind.FASP):
                warm = disp
            if kind == PhaseKind.NP:
                qres = qfi_np(p)
                eps_soft = _np_soft_eps_for_branch(p, branch)
            elif kind == PhaseKind.FSP:
                qres = qfi_fsp(p)
                eps_soft = fsp_modes(p).eps_of_q(0.0)
            else:
                qres = qfi_csp(p, disp=disp, kind=kind)
                eps_soft = float(eps_sorted[0])
            n1 = state.n_mean(0, 0.0)
            var_n1 = state.n_var(0, 0.0)
            if include_measurement:
                meas = inverted_variance(p, kind=kind, warm=disp)
                f_val, ratio = meas.inv_variance, meas.qcrb_ratio
            else:
                f_val, ratio = math.nan, math.nan
            status = "divergent" if qres.divergent else "ok"
            rows_by_index[idx] = SweepRow(
                x, distance, phase_name, qres.value, n1, var_n1, f_val, ratio, eps_soft, status
            )
        except Exception as exc:
            rows_by_index[idx] = SweepRow(
                x, distance, branch if branch != "auto" else "?", math.nan, math.nan,
                math.nan, math.nan, math.nan, math.nan, f"error:{type(exc).__name__}"
            )

    rows = [rows_by_index[i] for i in range(len(xs))]
    rows.sort(key=lambda r: r.x)
    control = {
        "omega": params.omega,
        "delta": params.delta,
        "j_hop": params.j_hop,
        "theta": params.theta,
        "g1": params.g1,
        "axis": axis,
        "branch": branch,
        "spacing": spacing,
        "n_points": n_points,
    }
    return SweepTable(axis=axis, control=control, critical={"value": critical}, rows=rows)


@dataclass
class ExponentFit:
    nu: float
    intercept: float
    r2: float
    window: tuple[float, float]
    n_points: int
    poor_fit: bool = False


def fit_exponent(
    table: SweepTable,
    column: str,
    window: tuple[float, float] | None = None,
    min_points: int = 8,
    min_decades: float = 1.5,
) -> ExponentFit:
    """Least-squares slope of log(column) against log(distance); nu = -slope."""
    d = table.column("distance")
    y = table.column(column)
    ok = table.ok_mask() & np.isfinite(y) & (y > 0.0) & (d > 0.0)
    if window is not None:
        ok &= (d >= window[0]) & (d <= window[1])
    d, y = d[ok], y[ok]
    if len(d) < min_points:
        raise InsufficientPoints(
            f"only {len(d)} usable points in the window (need {min_points})"
        )
    span = math.log10(d.max() / d.min())
    if span < min_decades:
        raise InsufficientPoints(
            f"window spans {span:.2f} decades (need {min_decades})"
        )
    lx, ly = np.log(d), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    win = (float(d.min()), float(d.max()))
    return ExponentFit(
        nu=float(-slope),
        intercept=float(intercept),
        r2=r2,
        window=win,
        n_points=len(d),
        poor_fit=r2 < 0.99,
    )


def heisenberg_verdict(nu_i: float, nu_n: float, nu_eps: float, tol: float = 0.15):
    """Compare the QFI exponent against the resource budget 2 nu_N + 2 nu_eps.

    Returns (verdict, residual) with verdict in {"HL", "sub-HL", "super-HL"}.
    """
    residual = nu_i - (2.0 * nu_n + 2.0 * nu_eps)
    if abs(residual) < tol:
        return "HL", residual
    if residual < 0:
        return "sub-HL", residual
    return "super-HL", residual


@dataclass
class AdiabaticResult:
    preparation_time: float
    eps_soft_end: float
    gamma: float
    q: float

    @property
    def time_gap_product(self) -> float:
        return self.preparation_time * self.eps_soft_end


def adiabatic_rate_bound(
    params: ModelParams,
    gamma: float,
    g1_end: float | None = None,
    q: float | None = None,
):
    """Adiabatic ramp schedule and preparation time in the normal phase.

    The sweep rate bound and schedule follow the soft-sector gap
    c_q/2 = omega + 2 J cos(theta) cos(q); the schedule
    v(g) = gamma * (c_q/2 - 4 g^2 omega)^{3/2} integrates to a preparation
    time T ~ 1 / (gamma * eps_soft(g1_end)).

    Returns (AdiabaticResult, v_schedule, v_upper_bound) with the two rate
    functions evaluable at any coupling.
    """
    label = classify_phase(params)
    if label.kind != PhaseKind.NP:
        raise DomainError("adiabatic ramp bound is defined in the normal phase")
    if q is None:
        q = label.soft_q
    if g1_end is None:
        g1_end = params.g1
    w, j, th = params.omega, params.j_hop, params.theta
    half_c = w + 2.0 * j * math.cos(th) * math.cos(q)

    def v_schedule(g: float) -> float:
        arg = half_c - 4.0 * g**2 * w
        if arg <= 0.0:
            raise DomainError("schedule evaluated past the soft-mode closing")
        return gamma * arg**1.5

    def v_bound(g: float) -> float:
        arg = half_c - 4.0 * g**2 * w
        if arg <= 0.0:
            raise DomainError("bound evaluated past the soft-mode closing")
        return 2.0 * g * math.sqrt(half_c) * arg**1.5 / (half_c + 4.0 * g**2 * w)

    t_val, _ = quad(lambda g: 1.0 / v_schedule(g), 0.0, g1_end, limit=200)
    eps_end = 0.5 * math.sqrt(2.0 * half_c * (2.0 * half_c - 8.0 * g1_end**2 * w))
    result = AdiabaticResult(
        preparation_time=float(t_val), eps_soft_end=float(eps_end), gamma=gamma, q=q
    )
    return result, v_schedule, v_bound
