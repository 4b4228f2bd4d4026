"""Second-order TCL and NZ master equations for the correlated projections.

Two projection families are supported:

* ``m``: project the bath onto the eigenspaces of J_3 (conserves J_3^tot).
* ``jm``: project onto the simultaneous (J^2, J_3) eigenspaces; its NZ2
  populations coincide with the exact dynamics.

Within each family the sector coherences decouple and the sector populations
close pairwise via d/dt [P^m_+ + P^{m+1}_-] = 0, so every solver reduces to
independent scalar problems per sector:

* TCL2 has closed forms, exp(-Lambda) with explicit decay exponents;
* NZ2 is a scalar Volterra equation with a two-term exponential kernel,
  handed to the volterra engine (the constant forcing produced by the
  pairwise closure is removed by shifting to the steady value, which keeps
  trace and J_3^tot conservation exact by construction).

All public trajectories are back-transformed to the rotating frame of the
central spin: populations are untouched, sector coherences pick up the phase
exp(-4 i A m t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import _validate_times
from .sectors import (
    SystemParams,
    _omega_minus,
    _omega_plus,
    jm_sector_table,
    two_m_values,
    weights_jm_array,
    weights_m_array,
)
from .trajectory import SectorSeries, Trajectory
from .volterra import SolveOptions, solve_volterra_batch, integrate_linear_ode

__all__ = [
    "SectorBundle",
    "tcl2_coherence_m",
    "tcl2_population_m",
    "nz2_coherence_m",
    "nz2_population_m",
    "tcl2_jm",
    "nz2_jm",
    "standard_projection_population",
    "to_rotating_frame",
    "j3tot_expectation",
]


@dataclass
class SectorBundle:
    """Sector-resolved solution: arrays of shape (n_sectors, n_times)."""

    two_m: np.ndarray
    two_j: np.ndarray | None
    p_plus: np.ndarray | None
    p_minus: np.ndarray | None
    coh: np.ndarray | None


def _resonance_eps(params: SystemParams) -> float:
    return 1e-8 * max(params.omega0, abs(params.A) * params.N)


def _coh_exponent_term(om, t, eps):
    """g(Omega, t) = (1 - e^{i Omega t})/Omega^2 + i t/Omega, series limit at resonance."""
    om = np.asarray(om, dtype=float)
    small = np.abs(om) < eps
    om_safe = np.where(small, 1.0, om)[:, None]
    x = om_safe * t[None, :]
    full = (1.0 - np.exp(1j * x)) / om_safe**2 + 1j * t[None, :] / om_safe
    series = 0.5 * t[None, :] ** 2 + (1j / 6.0) * om[:, None] * t[None, :] ** 3
    return np.where(small[:, None], series, full)


def _pop_exponent(coef, om, t, eps):
    """Lambda = coef (1 - cos(Omega t)) / Omega^2, series limit coef t^2/2 at resonance."""
    om = np.asarray(om, dtype=float)
    small = np.abs(om) < eps
    om_safe = np.where(small, 1.0, om)[:, None]
    full = coef[:, None] * (1.0 - np.cos(om_safe * t[None, :])) / om_safe**2
    x2 = (om[:, None] * t[None, :]) ** 2
    series = 0.5 * coef[:, None] * t[None, :] ** 2 * (1.0 - x2 / 12.0)
    return np.where(small[:, None], series, full)


# ---------------------------------------------------------------------------
# m-projection sector data
# ---------------------------------------------------------------------------


def _m_sectors(params: SystemParams):
    tm = two_m_values(params.N)
    w = weights_m_array(params.N)
    om_p = _omega_plus(params.omega0, params.A, tm)
    om_m = _omega_minus(params.omega0, params.A, tm)
    a2 = params.A * params.A
    b_plus = 2.0 * a2 * (params.N - tm)  # B_+(m) = 4A^2 (N/2 - m)
    b_minus = 2.0 * a2 * (params.N + tm)  # B_-(m) = 4A^2 (N/2 + m)
    return tm, w, om_p, om_m, b_plus, b_minus


def _m_population_constants(params: SystemParams):
    """Per-sector pairwise invariants and steady values for the m-projection.

    C_m = P^m_+(0) + P^{m+1}_-(0); the populations relax toward
    d_m = (N/2 + m + 1) C_m / (N + 1).
    """
    N = params.N
    p0 = params.initial_p_plus
    tm = two_m_values(N)
    w = weights_m_array(N)
    w_next = np.append(w[1:], 0.0)  # weight of sector m+1, 0 past the edge
    c = w * p0 + w_next * (1.0 - p0)
    d = ((N + tm) // 2 + 1) * c / (N + 1.0)
    y0 = w * p0 - d
    return tm, w, c, d, y0


def _m_sector_p_minus(params: SystemParams, p_plus_sectors: np.ndarray) -> np.ndarray:
    """P^m_-(t) = C_{m-1} - P^{m-1}_+(t), with the convention P^{m_min-1}_+ = 0."""
    N = params.N
    p0 = params.initial_p_plus
    w = weights_m_array(N)
    w_prev = np.concatenate(([0.0], w[:-1]))
    c_prev = w_prev * p0 + w * (1.0 - p0)  # P^{m-1}_+(0) + P^m_-(0)
    shifted = np.vstack([np.zeros_like(p_plus_sectors[0]), p_plus_sectors[:-1]])
    return c_prev[:, None] - shifted


def _frame_phase(params: SystemParams, two_m, t):
    # e^{-4 i A m t} = e^{-2 i A two_m t}
    return np.exp(-2j * params.A * np.multiply.outer(np.asarray(two_m, float), t))


def tcl2_coherence_m(params: SystemParams, times, return_sectors: bool = False):
    """TCL2 coherence under the J_3 projection (closed form).

    rho_{+-}(t) = rho_{+-}(0) sum_m (N_m/2^N) exp[-4iAmt - Lambda^coh_m(t)].
    """
    t = _validate_times(times)
    tm, w, om_p, om_m, b_p, b_m = _m_sectors(params)
    eps = _resonance_eps(params)
    lam = b_p[:, None] * _coh_exponent_term(om_p, t, eps) + b_m[:, None] * _coh_exponent_term(
        -om_m, t, eps
    )
    factors = np.exp(-2j * params.A * tm[:, None] * t[None, :] - lam)
    coh0 = complex(params.initial_coh)
    coh = coh0 * (1.0 + np.add.reduce(w[:, None] * (factors - 1.0), axis=0))
    traj = Trajectory(
        times=t, p_plus=None, p_minus=None, coh=coh,
        method="tcl2", projection="m", params=params,
    )
    if not return_sectors:
        return traj
    bundle = SectorBundle(
        two_m=tm, two_j=None, p_plus=None, p_minus=None,
        coh=coh0 * w[:, None] * factors,
    )
    return traj, bundle


def tcl2_population_m(params: SystemParams, times, return_sectors: bool = False):
    """TCL2 populations under the J_3 projection (closed form).

    Each sector relaxes as d_m + (P^m_+(0) - d_m) exp(-Lambda^pop_m) with
    Lambda^pop_m = 8A^2(N+1)(1 - cos Omega_+(m) t)/Omega_+^2(m).
    """
    t = _validate_times(times)
    N = params.N
    tm, w, c, d, y0 = _m_population_constants(params)
    om_p = _omega_plus(params.omega0, params.A, tm)
    coef = np.full(tm.shape, 8.0 * params.A**2 * (N + 1.0))
    lam = _pop_exponent(coef, om_p, t, _resonance_eps(params))
    p_plus = params.initial_p_plus + np.add.reduce(y0[:, None] * np.expm1(-lam), axis=0)
    traj = Trajectory(
        times=t, p_plus=p_plus, p_minus=1.0 - p_plus, coh=None,
        method="tcl2", projection="m", params=params,
    )
    if not return_sectors:
        return traj
    sectors = d[:, None] + y0[:, None] * np.exp(-lam)
    bundle = SectorBundle(
        two_m=tm, two_j=None, p_plus=sectors,
        p_minus=_m_sector_p_minus(params, sectors), coh=None,
    )
    return traj, bundle


def nz2_coherence_m(
    params: SystemParams, times, opts: SolveOptions | None = None,
    return_sectors: bool = False,
):
    """NZ2 coherence under the J_3 projection (per-sector Volterra solve)."""
    t = _validate_times(times)
    tm, w, om_p, om_m, b_p, b_m = _m_sectors(params)
    amps = np.stack([b_p, b_m], axis=1).astype(complex)
    rates = np.stack([1j * om_p, -1j * om_m], axis=1)
    coh0 = complex(params.initial_coh)
    x0 = w * coh0
    x = solve_volterra_batch(x0, amps, rates, t, opts=opts)
    sector_coh = x * _frame_phase(params, tm, t)
    coh = coh0 + np.add.reduce(sector_coh - x0[:, None], axis=0)
    traj = Trajectory(
        times=t, p_plus=None, p_minus=None, coh=coh,
        method="nz2", projection="m", params=params,
    )
    if not return_sectors:
        return traj
    return traj, SectorBundle(two_m=tm, two_j=None, p_plus=None, p_minus=None, coh=sector_coh)


def nz2_population_m(
    params: SystemParams, times, opts: SolveOptions | None = None,
    return_sectors: bool = False,
):
    """NZ2 populations under the J_3 projection.

    After eliminating P^{m+1}_- through the pairwise conservation law, each
    sector obeys a scalar Volterra equation with the cosine kernel
    8A^2(N+1) cos(Omega_+(m) tau) around its steady value.
    """
    t = _validate_times(times)
    N = params.N
    tm, w, c, d, y0 = _m_population_constants(params)
    om_p = _omega_plus(params.omega0, params.A, tm)
    half = 4.0 * params.A**2 * (N + 1.0)  # cosine kernel split into e^{+-i Omega tau}/2
    amps = np.full((tm.size, 2), half, dtype=complex)
    rates = np.stack([1j * om_p, -1j * om_p], axis=1)
    y = solve_volterra_batch(y0.astype(complex), amps, rates, t, opts=opts)
    y = y.real
    p_plus = params.initial_p_plus + np.add.reduce(y - y0[:, None], axis=0)
    traj = Trajectory(
        times=t, p_plus=p_plus, p_minus=1.0 - p_plus, coh=None,
        method="nz2", projection="m", params=params,
    )
    if not return_sectors:
        return traj
    sectors = d[:, None] + y
    bundle = SectorBundle(
        two_m=tm, two_j=None, p_plus=sectors,
        p_minus=_m_sector_p_minus(params, sectors), coh=None,
    )
    return traj, bundle


# ---------------------------------------------------------------------------
# (j, m)-projection
# ---------------------------------------------------------------------------


def _jm_sectors(params: SystemParams):
    tj, tm = jm_sector_table(params.N)
    w = weights_jm_array(params.N)
    om_p = _omega_plus(params.omega0, params.A, tm)
    om_m = _omega_minus(params.omega0, params.A, tm)
    a2 = params.A * params.A
    bt_plus = a2 * (tj * (tj + 2) - tm * (tm + 2))  # 4A^2 b(j, m)
    bt_minus = a2 * (tj * (tj + 2) - tm * (tm - 2))  # 4A^2 b(j, -m)
    return tj, tm, w, om_p, om_m, bt_plus, bt_minus


def _jm_population_constants(params: SystemParams):
    tj, tm = jm_sector_table(params.N)
    w = weights_jm_array(params.N)
    p0 = params.initial_p_plus
    has_up = tm < tj  # sector (j, m+1) exists
    c = w * p0 + np.where(has_up, w * (1.0 - p0), 0.0)
    y0 = w * p0 - 0.5 * c
    return tj, tm, w, c, y0


def tcl2_jm(params: SystemParams, times, return_sectors: bool = False):
    """TCL2 populations and coherence under the full (J^2, J_3) projection.

    Same closed forms as the m-projection with the replacement
    B_+- -> 4A^2 b(j, +-m) and pair weight N+1 -> 2 b(j, m); the populations
    relax toward C_{jm}/2 with
    Lambda^pop_{jm} = 16A^2 b(j,m) (1 - cos Omega_+(m) t)/Omega_+^2(m).
    """
    t = _validate_times(times)
    tj, tm, w, om_p, om_m, bt_p, bt_m = _jm_sectors(params)
    eps = _resonance_eps(params)

    lam_coh = bt_p[:, None] * _coh_exponent_term(om_p, t, eps) + bt_m[
        :, None
    ] * _coh_exponent_term(-om_m, t, eps)
    factors = np.exp(-2j * params.A * tm[:, None] * t[None, :] - lam_coh)
    coh0 = complex(params.initial_coh)
    coh = coh0 * (1.0 + np.add.reduce(w[:, None] * (factors - 1.0), axis=0))

    _, _, _, c, y0 = _jm_population_constants(params)
    lam_pop = _pop_exponent(4.0 * bt_p, om_p, t, eps)  # 16 A^2 b(j,m) (1-cos)/Omega^2
    p_plus = params.initial_p_plus + np.add.reduce(y0[:, None] * np.expm1(-lam_pop), axis=0)

    traj = Trajectory(
        times=t, p_plus=p_plus, p_minus=1.0 - p_plus, coh=coh,
        method="tcl2", projection="jm", params=params,
    )
    if not return_sectors:
        return traj
    sectors = 0.5 * c[:, None] + y0[:, None] * np.exp(-lam_pop)
    bundle = SectorBundle(
        two_m=tm, two_j=tj, p_plus=sectors,
        p_minus=_jm_sector_p_minus(params, sectors),
        coh=coh0 * w[:, None] * factors,
    )
    return traj, bundle


def _jm_sector_p_minus(params: SystemParams, p_plus_sectors: np.ndarray) -> np.ndarray:
    """P^{jm}_-(t) = C_{j,m-1} - P^{j,m-1}_+(t) within each j multiplet."""
    tj, tm = jm_sector_table(params.N)
    w = weights_jm_array(params.N)
    p0 = params.initial_p_plus
    index = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(tj, tm))}
    out = np.empty_like(p_plus_sectors)
    for i, (a, b) in enumerate(zip(tj, tm)):
        below = index.get((int(a), int(b) - 2))
        c_prev = w[i] * (1.0 - p0) + (w[i] * p0 if below is not None else 0.0)
        out[i] = c_prev - (p_plus_sectors[below] if below is not None else 0.0)
    return out


def nz2_jm(
    params: SystemParams, times, opts: SolveOptions | None = None,
    return_sectors: bool = False,
):
    """NZ2 populations and coherence under the full (J^2, J_3) projection.

    The population route reproduces the exact dynamics up to solver error:
    each sector solves a scalar Volterra equation with the cosine kernel
    16 A^2 b(j,m) cos(Omega_+(m) tau) around the steady value C_{jm}/2.
    """
    t = _validate_times(times)
    tj, tm, w, om_p, om_m, bt_p, bt_m = _jm_sectors(params)
    coh0 = complex(params.initial_coh)

    amps_c = np.stack([bt_p, bt_m], axis=1).astype(complex)
    rates_c = np.stack([1j * om_p, -1j * om_m], axis=1)
    x0 = w * coh0
    x = solve_volterra_batch(x0, amps_c, rates_c, t, opts=opts)
    sector_coh = x * _frame_phase(params, tm, t)
    coh = coh0 + np.add.reduce(sector_coh - x0[:, None], axis=0)

    _, _, _, c, y0 = _jm_population_constants(params)
    amps_p = np.stack([2.0 * bt_p, 2.0 * bt_p], axis=1).astype(complex)  # 8A^2 b each
    rates_p = np.stack([1j * om_p, -1j * om_p], axis=1)
    y = solve_volterra_batch(y0.astype(complex), amps_p, rates_p, t, opts=opts).real
    p_plus = params.initial_p_plus + np.add.reduce(y - y0[:, None], axis=0)

    traj = Trajectory(
        times=t, p_plus=p_plus, p_minus=1.0 - p_plus, coh=coh,
        method="nz2", projection="jm", params=params,
    )
    if not return_sectors:
        return traj
    sectors = 0.5 * c[:, None] + y
    bundle = SectorBundle(
        two_m=tm, two_j=tj, p_plus=sectors,
        p_minus=_jm_sector_p_minus(params, sectors), coh=sector_coh,
    )
    return traj, bundle


# ---------------------------------------------------------------------------
# standard product projection, frame utilities, diagnostics
# ---------------------------------------------------------------------------


def standard_projection_population(params: SystemParams, times) -> Trajectory:
    """TCL2 populations under the standard product projection (closed form).

    P_+(t) = [1 + exp(-(8A^2 N/omega0^2)(1 - cos omega0 t))]/2; only the
    initial condition P_+(0) = 1 is supported (as printed).
    """
    if params.initial_p_plus != 1.0:
        raise ValueError(
            "standard_projection_population requires initial_p_plus = 1"
        )
    t = _validate_times(times)
    rate = 8.0 * params.A**2 * params.N / params.omega0**2
    p_plus = 0.5 * (1.0 + np.exp(-rate * (1.0 - np.cos(params.omega0 * t))))
    return Trajectory(
        times=t, p_plus=p_plus, p_minus=1.0 - p_plus, coh=None,
        method="standard", projection="product", params=params,
    )


def to_rotating_frame(
    params: SystemParams, two_m: int, times, series: SectorSeries
) -> SectorSeries:
    """Back-transform one sector block from the H_0 interaction picture.

    Populations are returned bit-identical; the coherence picks up the
    phase factor exp(-4 i A m t).
    """
    t = np.asarray(times, dtype=float)
    phase = np.exp(-2j * params.A * two_m * t)
    return SectorSeries(
        p_plus=series.p_plus, p_minus=series.p_minus, coh=series.coh * phase
    )


def j3tot_expectation(bundle: SectorBundle) -> np.ndarray:
    """tr{J_3^tot P rho(t)} = sum_m [(m + 1/2) P^m_+ + (m - 1/2) P^m_-]."""
    if bundle.p_plus is None or bundle.p_minus is None:
        raise ValueError("sector populations required")
    m = 0.5 * bundle.two_m.astype(float)
    return np.add.reduce(
        (m + 0.5)[:, None] * bundle.p_plus + (m - 0.5)[:, None] * bundle.p_minus, axis=0
    )


# ---------------------------------------------------------------------------
# direct integration of the time-local TCL equations (consistency oracles)
# ---------------------------------------------------------------------------


def _integrated_kernel(b_p, b_m, om_p, om_m, t, eps):
    """int_0^t [B_+ e^{i Omega_+ s} + B_- e^{-i Omega_- s}] ds, resonance-guarded."""

    def one(b, om, sign):
        if abs(om) < eps:
            return b * t
        return b * (np.exp(sign * 1j * om * t) - 1.0) / (sign * 1j * om)

    return np.array(
        [one(bp, op, +1) + one(bm, om_, -1) for bp, bm, op, om_ in zip(b_p, b_m, om_p, om_m)]
    )


def tcl2_coherence_via_ode(
    params: SystemParams, times, family: str = "m", opts: SolveOptions | None = None
) -> Trajectory:
    """Integrate the time-local TCL2 coherence equations directly (no closed form).

    Cross-validates the Lambda^coh exponents, including the jm variant whose
    closed form is derived rather than printed.
    """
    t = _validate_times(times)
    if family == "m":
        tm, w, om_p, om_m, b_p, b_m = _m_sectors(params)
    elif family == "jm":
        _, tm, w, om_p, om_m, b_p, b_m = _jm_sectors(params)
    else:
        raise ValueError(f"unknown family {family!r}")
    eps = _resonance_eps(params)

    def rhs(tt, x):
        lam = _integrated_kernel(b_p, b_m, om_p, om_m, tt, eps)
        return -lam * x

    coh0 = complex(params.initial_coh)
    x0 = w.astype(complex) * coh0
    xs = integrate_linear_ode(x0, rhs, t, opts or SolveOptions(step=0.01))
    sector = xs.T * _frame_phase(params, tm, t)
    coh = coh0 + np.add.reduce(sector - x0[:, None], axis=0)
    return Trajectory(
        times=t, p_plus=None, p_minus=None, coh=coh,
        method="tcl2_ode", projection=family, params=params,
    )


def tcl2_population_via_ode(
    params: SystemParams, times, family: str = "m", opts: SolveOptions | None = None
) -> Trajectory:
    """Integrate the time-local TCL2 population equations directly."""
    t = _validate_times(times)
    a2 = params.A * params.A
    if family == "m":
        tm, w, c, d, y0 = _m_population_constants(params)
        om_p = _omega_plus(params.omega0, params.A, tm)
        gain = ((params.N + tm) // 2 + 1) * c  # (N/2 + m + 1) C_m
        loss = np.full(tm.shape, params.N + 1.0)
        scale = 8.0 * a2
    elif family == "jm":
        tj, tm, w, c, y0 = _jm_population_constants(params)
        om_p = _omega_plus(params.omega0, params.A, tm)
        b_p = 0.25 * (tj * (tj + 2) - tm * (tm + 2))
        gain = b_p * c
        loss = 2.0 * b_p
        scale = 8.0 * a2
    else:
        raise ValueError(f"unknown family {family!r}")
    eps = _resonance_eps(params)
    sin_over = lambda tt: np.where(  # noqa: E731
        np.abs(om_p) < eps, tt, np.sin(om_p * tt) / np.where(np.abs(om_p) < eps, 1.0, om_p)
    )

    def rhs(tt, p):
        return scale * sin_over(tt) * (gain - loss * p)

    p0_sectors = (w * params.initial_p_plus).astype(complex)
    ps = integrate_linear_ode(p0_sectors, rhs, t, opts or SolveOptions(step=0.01)).real
    p_plus = params.initial_p_plus + np.add.reduce(ps.T - p0_sectors.real[:, None], axis=0)
    return Trajectory(
        times=t, p_plus=p_plus, p_minus=1.0 - p_plus, coh=None,
        method="tcl2_ode", projection=family, params=params,
    )
