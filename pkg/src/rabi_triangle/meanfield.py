"""Mean-field displacements of the superradiant phases.

All amplitudes here are rescaled, A_n -> A_n * sqrt(omega/delta), which makes
the stationarity equations and the ground-energy density independent of the
qubit gap.  The physical displacement is recovered by multiplying with
sqrt(delta/omega).

The stationarity conditions close under the gauge-fixed ansatz B1 = 0,
B2 = -B3, A2 = A3 = a, A1 = b, which reduces them to two coupled equations
for (a, b); the imaginary part follows linearly,
B2 = J sin(theta) (b - a) / (omega - J cos(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import NoConvergence, OutsideFSP
from .model import ModelParams

_ROOT_TOL = 1e-13
_DEDUP_DECIMALS = 9
_ENERGY_TIE = 1e-12
_MAX_NEWTON = 80


@dataclass
class Displacement:
    """Rescaled mean-field amplitudes of the three cavities.

    a_tilde, b_tilde
        Real and imaginary parts of alpha_n * sqrt(omega/delta).
    degenerate
        True when two distinct stationary points tied in energy within
        tolerance, so the returned branch was picked by convention.
    residual
        Sup-norm of the full six stationarity equations at the solution.
    """

    a_tilde: np.ndarray
    b_tilde: np.ndarray
    degenerate: bool = False
    residual: float = 0.0

    @property
    def alpha_tilde(self) -> np.ndarray:
        return self.a_tilde + 1j * self.b_tilde

    def alpha(self, params: ModelParams) -> np.ndarray:
        """Physical displacement alpha_n = sqrt(delta/omega) * alpha_tilde."""
        return math.sqrt(params.delta / params.omega) * self.alpha_tilde

    def kappa(self, params: ModelParams) -> np.ndarray:
        """Per-cavity anomalous coefficient lambda_n^2 / Delta_n.

        Reduces to g1^2 * omega at zero displacement.
        """
        g1, w = params.g1, params.omega
        return g1**2 * w / (1.0 + 16.0 * g1**2 * self.a_tilde**2) ** 1.5

    def delta_n(self, params: ModelParams) -> np.ndarray:
        """Dressed qubit gaps Delta_n = Delta * sqrt(1 + 16 g1^2 A_n^2)."""
        return params.delta * np.sqrt(1.0 + 16.0 * params.g1**2 * self.a_tilde**2)

    @property
    def is_zero(self) -> bool:
        return bool(
            np.all(np.abs(self.a_tilde) < 1e-14) and np.all(np.abs(self.b_tilde) < 1e-14)
        )


def zero_displacement() -> Displacement:
    return Displacement(np.zeros(3), np.zeros(3))


def fsp_displacement(params: ModelParams) -> Displacement:
    """Uniform real displacement branch (closed form).

    Vanishes continuously at the q=0 boundary; raises OutsideFSP below it.
    The positive root is returned; the two signs are parity partners.
    """
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    if g1 <= 0.0:
        raise OutsideFSP("uniform branch requires g1 > 0")
    denom = w + 2.0 * j * math.cos(th)
    rad = g1**2 * w**2 / denom**2 - 1.0 / (16.0 * g1**2)
    if rad < 0.0:
        if rad > -1e-15 * max(1.0, g1**2):
            rad = 0.0
        else:
            raise OutsideFSP(
                f"no real uniform displacement at g1={g1} (radicand {rad})"
            )
    amp = math.sqrt(rad)
    return Displacement(np.full(3, amp), np.zeros(3))


def energy_rescaled(params: ModelParams, a: np.ndarray, b: np.ndarray) -> float:
    """Ground-energy density (omega/delta) * E_g of a displacement config."""
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    an = np.roll(a, -1)  # A_{n+1}
    bn = np.roll(b, -1)
    quad = w * np.sum(a**2 + b**2)
    qubit = -0.5 * w * np.sum(np.sqrt(1.0 + 16.0 * g1**2 * a**2))
    hop = 2.0 * j * np.sum(
        math.cos(th) * (a * an + b * bn) + math.sin(th) * (b * an - a * bn)
    )
    return float(quad + qubit + hop)


def stationarity_residual(params: ModelParams, a: np.ndarray, b: np.ndarray) -> float:
    """Sup-norm of the six mean-field stationarity equations (rescaled)."""
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ap, am = np.roll(a, -1), np.roll(a, 1)  # A_{n+1}, A_{n-1}
    bp, bm = np.roll(b, -1), np.roll(b, 1)
    s = 4.0 * g1**2 * w / np.sqrt(1.0 + 16.0 * g1**2 * a**2)
    r_a = w * a - s * a + j * math.cos(th) * (ap + am) + j * math.sin(th) * (bm - bp)
    r_b = w * b + j * math.sin(th) * (ap - am) + j * math.cos(th) * (bp + bm)
    return float(max(np.max(np.abs(r_a)), np.max(np.abs(r_b))))


def _b2_of(params: ModelParams, a: float, b: float) -> float:
    w, j, th = params.omega, params.j_hop, params.theta
    return j * math.sin(th) * (b - a) / (w - j * math.cos(th))


def _vectors(params: ModelParams, a: float, b: float):
    b2 = _b2_of(params, a, b)
    return np.array([b, a, a]), np.array([0.0, b2, -b2])


def _reduced_F(params: ModelParams, a: float, b: float) -> np.ndarray:
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    c1 = j * math.cos(th)
    c2 = j**2 * math.sin(th) ** 2 / (w - j * math.cos(th))
    s_a = 4.0 * g1**2 * w / math.sqrt(1.0 + 16.0 * g1**2 * a**2)
    s_b = 4.0 * g1**2 * w / math.sqrt(1.0 + 16.0 * g1**2 * b**2)
    f1 = (w - s_b - 2.0 * c2) * b + 2.0 * (c1 + c2) * a
    f2 = (w - s_a - 2.0 * c2) * a + (c1 + c2) * (a + b)
    return np.array([f1, f2])


def _reduced_jac(params: ModelParams, a: float, b: float) -> np.ndarray:
    w, j, th, g1 = params.omega, params.j_hop, params.theta, params.g1
    c1 = j * math.cos(th)
    c2 = j**2 * math.sin(th) ** 2 / (w - j * math.cos(th))

    def s(x):
        return 4.0 * g1**2 * w / math.sqrt(1.0 + 16.0 * g1**2 * x**2)

    def sp(x):
        return -64.0 * g1**4 * w * x / (1.0 + 16.0 * g1**2 * x**2) ** 1.5

    d11 = 2.0 * (c1 + c2)  # dF1/da
    d12 = (w - s(b) - 2.0 * c2) - sp(b) * b  # dF1/db
    d21 = (w - s(a) - 2.0 * c2) - sp(a) * a + (c1 + c2)  # dF2/da
    d22 = c1 + c2  # dF2/db
    return np.array([[d11, d12], [d21, d22]])


def _newton(params: ModelParams, a0: float, b0: float):
    """Damped Newton on the reduced system; returns (a, b) or None."""
    x = np.array([a0, b0], dtype=float)
    f = _reduced_F(params, *x)
    scale = params.omega * (1.0 + abs(x[0]) + abs(x[1]))
    for _ in range(_MAX_NEWTON):
        if np.max(np.abs(f)) < _ROOT_TOL * scale:
            return float(x[0]), float(x[1])
        jac = _reduced_jac(params, *x)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        norm0 = float(np.dot(f, f))
        while lam > 1e-8:
            xn = x + lam * step
            fn = _reduced_F(params, *xn)
            if float(np.dot(fn, fn)) < norm0 * (1.0 - 1e-4 * lam) or lam == 1.0 and float(
                np.dot(fn, fn)
            ) < norm0:
                break
            lam *= 0.5
        else:
            return None
        x = x + lam * step
        f = _reduced_F(params, *x)
        scale = params.omega * (1.0 + abs(x[0]) + abs(x[1]))
    if np.max(np.abs(f)) < 1e-10 * scale:
        return float(x[0]), float(x[1])
    return None


def _canonicalize(params: ModelParams, a: float, b: float) -> tuple[float, float]:
    """Pick the parity representative: B2 > 0, else A1 - A2 > 0, else A > 0."""
    b2 = _b2_of(params, a, b)
    scale = max(1.0, abs(a), abs(b))
    if abs(b2) > 1e-12 * scale:
        if b2 < 0.0:
            return -a, -b
        return a, b
    if abs(b - a) > 1e-12 * scale:
        if b - a < 0.0:
            return -a, -b
        return a, b
    if b < 0.0:
        return -a, -b
    return a, b


def _default_seeds(params: ModelParams) -> list[tuple[float, float]]:
    seeds = [(0.0, 0.0)]
    try:
        f = fsp_displacement(params)
        amp = float(f.a_tilde[0])
        seeds.append((amp, amp))
        seeds.append((-0.5 * amp, amp))  # chiral/frustrated pattern (a, b)
        seeds.append((0.5 * amp, -amp))
        seeds.append((amp * 1.2, amp * 0.3))
        seeds.append((amp * 0.3, amp * 1.2))
    except OutsideFSP:
        pass
    for r in (0.05, 0.3, 0.8):
        seeds.append((-0.5 * r, r))
        seeds.append((0.5 * r, -r))
        seeds.append((r, r))
    return seeds


def csp_displacement(
    params: ModelParams,
    seeds: list[Displacement] | None = None,
    rng_seed: int | None = None,
    n_random: int = 0,
) -> Displacement:
    """Energy-minimizing stationary displacement in the broken-symmetry region.

    Multi-start damped Newton on the reduced (a, b) system; candidate roots
    are ranked by the rescaled ground energy, with ties resolved toward the
    first caller-supplied seed (sweep warm starts stay on their branch).
    Falls back to derivative-free minimization when no start converges.
    """
    start_list: list[tuple[float, float]] = []
    warm: tuple[float, float] | None = None
    if seeds:
        for s in seeds:
            ab = (float(s.a_tilde[1]), float(s.a_tilde[0]))  # (a, b) = (A2, A1)
            start_list.append(ab)
        warm = start_list[0]
    start_list.extend(_default_seeds(params))
    if n_random > 0:
        rng = np.random.default_rng(0 if rng_seed is None else rng_seed)
        for _ in range(n_random):
            start_list.append(tuple(rng.uniform(-1.0, 1.0, size=2)))

    roots: dict[tuple[float, float], tuple[float, float]] = {}
    for a0, b0 in start_list:
        sol = _newton(params, a0, b0)
        if sol is None:
            continue
        a, b = _canonicalize(params, *sol)
        key = (round(a, _DEDUP_DECIMALS), round(b, _DEDUP_DECIMALS))
        roots.setdefault(key, (a, b))

    if not roots:
        best = None
        for a0, b0 in start_list[:6]:
            res = minimize(
                lambda x: energy_rescaled(params, *_vectors(params, x[0], x[1])),
                np.array([a0, b0]),
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
            )
            if best is None or res.fun < best.fun:
                best = res
        sol = _newton(params, best.x[0], best.x[1]) if best is not None else None
        if sol is None:
            resid = (
                float(np.max(np.abs(_reduced_F(params, *best.x))))
                if best is not None
                else math.inf
            )
            raise NoConvergence("mean-field solver did not converge", residual=resid)
        a, b = _canonicalize(params, *sol)
        roots[(round(a, _DEDUP_DECIMALS), round(b, _DEDUP_DECIMALS))] = (a, b)

    entries = []
    for a, b in roots.values():
        va, vb = _vectors(params, a, b)
        e = energy_rescaled(params, va, vb)
        dist = 0.0 if warm is None else (a - warm[0]) ** 2 + (b - warm[1]) ** 2
        entries.append((e, dist, a, b))
    entries.sort(key=lambda t: (t[0], t[1]))

    e_min = entries[0][0]
    ties = [t for t in entries if t[0] - e_min < _ENERGY_TIE * max(1.0, abs(e_min))]
    degenerate = False
    if len(ties) > 1:
        first = ties[0]
        for t in ties[1:]:
            if abs(t[2] - first[2]) > 1e-8 or abs(t[3] - first[3]) > 1e-8:
                degenerate = True
                break

    _, _, a, b = ties[0]
    va, vb = _vectors(params, a, b)
    disp = Displacement(va, vb, degenerate=degenerate)
    disp.residual = stationarity_residual(params, va, vb)
    return disp


def solve_displacement(params: ModelParams, phase_kind, warm: Displacement | None = None) -> Displacement:
    """Phase-appropriate displacement: zero, closed-form uniform, or solved."""
    from .model import PhaseKind

    if phase_kind == PhaseKind.NP:
        return zero_displacement()
    if phase_kind == PhaseKind.FSP:
        return fsp_displacement(params)
    seeds = [warm] if warm is not None else None
    return csp_displacement(params, seeds=seeds)
