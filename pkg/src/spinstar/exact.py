"""Closed-form exact dynamics of the central spin for uniform couplings.

The bath decomposes into (j, m) multiplets; within each, the pair
|+> (x) |j,m>  <->  |-> (x) |j,m+1> evolves as a detuned two-level Rabi
problem with frequency mu_+(j, m) and detuning Omega_+(m).  Populations and
coherences of the reduced state are weighted double sums over sectors.

Everything is reported in the rotating frame of the central spin; the A=0
limit therefore leaves both populations and coherence constant.
"""

from __future__ import annotations

import numpy as np

from .sectors import (
    SystemParams,
    _omega_minus,
    _omega_plus,
    jm_sector_table,
    weights_jm_array,
)
from .trajectory import Trajectory

__all__ = ["exact_population_plus", "exact_coherence", "exact_trajectory"]

# times are processed in chunks to bound the (n_sectors, n_times) temporaries
_TIME_CHUNK = 2048


def _validate_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("times must be a non-empty 1-D array")
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    if not np.all(np.diff(t) > 0.0):
        raise ValueError("times must be strictly increasing")
    return t


def _sector_arrays(params: SystemParams):
    two_j, two_m = jm_sector_table(params.N)
    w = weights_jm_array(params.N)  # N_j / 2^N = p(j)/(2j+1)
    return two_j, two_m, w


def _branch_terms(params: SystemParams, two_j, two_m, branch: int):
    """(omega, mu, 4A^2 b) arrays for one branch over the sector table."""
    A = params.A
    if branch == +1:
        om = _omega_plus(params.omega0, A, two_m)
        b4 = A * A * (two_j * (two_j + 2) - two_m * (two_m + 2))  # 4A^2 b(j,m)
    else:
        om = _omega_minus(params.omega0, A, two_m)
        b4 = A * A * (two_j * (two_j + 2) - two_m * (two_m - 2))  # 4A^2 b(j,-m)
    mu = np.sqrt(0.25 * om * om + b4)
    return om, mu, b4


def _sin_over_mu(mu, t):
    """sin(mu t)/mu, evaluated as t*sinc near mu = 0 (degenerate sectors)."""
    x = np.multiply.outer(mu, t)
    small = mu < 1e-300
    safe_mu = np.where(small, 1.0, mu)
    out = np.sin(x) / safe_mu[:, None]
    if np.any(small):
        out[small, :] = t[None, :]
    return out


def population_survival(
    params: SystemParams, times: np.ndarray, branch: int, sector_mask=None
) -> np.ndarray:
    """Probability that the central spin stays in |+> (branch=+1) or |-> (branch=-1).

    Evaluated as 1 - sum_s w_s * 4A^2 b_s * (sin(mu_s t)/mu_s)^2, which is
    exactly 1 at t = 0 and free of 0/0 at degenerate sectors.  ``sector_mask``
    restricts the sum (used by truncation diagnostics); the dropped weight is
    then missing from the constant term as well, so the result stays a
    survival probability of the truncated ensemble plus the frozen remainder.
    """
    two_j, two_m, w = _sector_arrays(params)
    _, mus, b4 = _branch_terms(params, two_j, two_m, branch)
    coef = w * b4  # deficit amplitude per sector
    if sector_mask is not None:
        coef = np.where(sector_mask, coef, 0.0)
    out = np.empty_like(times)
    for lo in range(0, times.size, _TIME_CHUNK):
        t = times[lo : lo + _TIME_CHUNK]
        s = _sin_over_mu(mus, t)
        out[lo : lo + _TIME_CHUNK] = 1.0 - np.add.reduce(coef[:, None] * s * s, axis=0)
    return out


def exact_population_plus(params: SystemParams, times) -> Trajectory:
    """Exact upper-state population P_+(t) (populations only).

    Arbitrary initial_p_plus is handled by linearity between the solution
    started in |+> and its mirror started in |->.
    """
    t = _validate_times(times)
    p0 = params.initial_p_plus
    f_plus = population_survival(params, t, +1)
    f_minus = population_survival(params, t, -1)
    p_plus = p0 * f_plus + (1.0 - p0) * (1.0 - f_minus)
    return Trajectory(
        times=t,
        p_plus=p_plus,
        p_minus=1.0 - p_plus,
        coh=None,
        method="exact",
        projection="none",
        params=params,
    )


def exact_coherence(params: SystemParams, times) -> Trajectory:
    """Exact coherence rho_{+-}(t) in the rotating frame (coherence only)."""
    t = _validate_times(times)
    two_j, two_m, w = _sector_arrays(params)
    om_p, mu_p, _ = _branch_terms(params, two_j, two_m, +1)
    om_m, mu_m, _ = _branch_terms(params, two_j, two_m, -1)
    coh0 = complex(params.initial_coh)

    coh = np.empty(t.shape, dtype=complex)
    for lo in range(0, t.size, _TIME_CHUNK):
        tc = t[lo : lo + _TIME_CHUNK]
        sp = _sin_over_mu(mu_p, tc)
        sm = _sin_over_mu(mu_m, tc)
        br_p = np.cos(np.multiply.outer(mu_p, tc)) - 0.5j * om_p[:, None] * sp
        br_m = np.cos(np.multiply.outer(mu_m, tc)) + 0.5j * om_m[:, None] * sm
        phase = np.exp(1j * params.omega0 * tc)[None, :]
        # written as 1 + sum w (f - 1) so that coh(0) == initial_coh exactly
        factor = 1.0 + np.add.reduce(w[:, None] * (phase * br_p * br_m - 1.0), axis=0)
        coh[lo : lo + _TIME_CHUNK] = coh0 * factor
    return Trajectory(
        times=t,
        p_plus=None,
        p_minus=None,
        coh=coh,
        method="exact",
        projection="none",
        params=params,
    )


def exact_trajectory(params: SystemParams, times) -> Trajectory:
    """Populations and coherence in one trajectory."""
    pop = exact_population_plus(params, times)
    coh = exact_coherence(params, times)
    return Trajectory(
        times=pop.times,
        p_plus=pop.p_plus,
        p_minus=pop.p_minus,
        coh=coh.coh,
        method="exact",
        projection="none",
        params=params,
    )
