import math

import numpy as np
import pytest

from spinstar.exact import exact_population_plus
from spinstar.masters import (
    j3tot_expectation,
    nz2_coherence_m,
    nz2_jm,
    nz2_population_m,
    standard_projection_population,
    tcl2_coherence_m,
    tcl2_coherence_via_ode,
    tcl2_jm,
    tcl2_population_m,
    tcl2_population_via_ode,
    to_rotating_frame,
)
from spinstar.sectors import SystemParams, coupling_from_alpha, weights_m_array
from spinstar.trajectory import SectorSeries
from spinstar.volterra import SolveOptions

PARAMS = SystemParams(
    N=5, A=0.08, omega0=1.1, initial_p_plus=0.7, initial_coh=0.25 - 0.15j
)
T = np.linspace(0.0, 25.0, 126)


class TestClosedFormsAgainstDirectIntegration:
    """The exp(-Lambda) closed forms vs RK4 on the time-local equations."""

    @pytest.mark.parametrize("family", ["m", "jm"])
    def test_coherence(self, family):
        closed = tcl2_coherence_m(PARAMS, T) if family == "m" else tcl2_jm(PARAMS, T)
        ode = tcl2_coherence_via_ode(PARAMS, T, family=family)
        np.testing.assert_allclose(closed.coh, ode.coh, rtol=0, atol=1e-9)

    @pytest.mark.parametrize("family", ["m", "jm"])
    def test_populations(self, family):
        closed = tcl2_population_m(PARAMS, T) if family == "m" else tcl2_jm(PARAMS, T)
        ode = tcl2_population_via_ode(PARAMS, T, family=family)
        np.testing.assert_allclose(closed.p_plus, ode.p_plus, rtol=0, atol=1e-9)


class TestInitialConditionsAndConservation:
    SOLVERS = [
        lambda p, t: tcl2_population_m(p, t),
        lambda p, t: nz2_population_m(p, t),
        lambda p, t: tcl2_jm(p, t),
        lambda p, t: nz2_jm(p, t),
    ]

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_initial_population_exact(self, solver):
        traj = solver(PARAMS, np.array([0.0, 1.0, 2.0]))
        assert traj.p_plus[0] == PARAMS.initial_p_plus

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_trace_preserved_exactly(self, solver):
        traj = solver(PARAMS, T)
        assert traj.trace_drift() == 0.0  # p_minus = 1 - p_plus by construction

    def test_initial_coherence_exact(self):
        for traj in (tcl2_coherence_m(PARAMS, T), tcl2_jm(PARAMS, T),
                     nz2_coherence_m(PARAMS, T), nz2_jm(PARAMS, T)):
            assert traj.coh[0] == complex(PARAMS.initial_coh)

    def test_j3tot_conserved(self):
        t = np.linspace(0.0, 40.0, 81)
        bundles = [
            tcl2_population_m(PARAMS, t, return_sectors=True)[1],
            nz2_population_m(PARAMS, t, return_sectors=True)[1],
            tcl2_jm(PARAMS, t, return_sectors=True)[1],
            nz2_jm(PARAMS, t, return_sectors=True)[1],
        ]
        for bundle in bundles:
            q = j3tot_expectation(bundle)
            assert np.max(np.abs(q - q[0])) <= 1e-12

    def test_j3tot_requires_populations(self):
        _, bundle = tcl2_coherence_m(PARAMS, T, return_sectors=True)
        with pytest.raises(ValueError):
            j3tot_expectation(bundle)

    def test_sector_coherence_magnitudes_bounded(self):
        # Re Lambda^coh >= 0: every sector factor can only shrink
        w = weights_m_array(PARAMS.N)
        _, bundle = tcl2_coherence_m(PARAMS, T, return_sectors=True)
        bound = (w * abs(complex(PARAMS.initial_coh)))[:, None]
        assert np.all(np.abs(bundle.coh) <= bound + 1e-12)


class TestMProjectionDecayExponent:
    def test_known_population_exponent_value(self):
        # N=2, A=0.1, m=0: Lambda = 8 A^2 (N+1) (1 - cos(1.2 t)) / 1.2^2
        # equals 1/3 at t = pi/1.2
        p = SystemParams(N=2, A=0.1, omega0=1.0, initial_p_plus=1.0)
        t = np.array([0.0, math.pi / 1.2])
        _, bundle = tcl2_population_m(p, t, return_sectors=True)
        w = weights_m_array(2)  # [1/4, 1/2, 1/4]
        d0 = 2.0 * w[1] / 3.0  # steady value of the m=0 sector, p0 = 1
        y0 = w[1] - d0
        lam = -math.log((bundle.p_plus[1, 1] - d0) / y0)
        np.testing.assert_allclose(lam, 1.0 / 3.0, rtol=1e-12)

    def test_sector_populations_sum_to_total(self):
        for fn in (tcl2_population_m, nz2_population_m):
            traj, bundle = fn(PARAMS, T, return_sectors=True)
            np.testing.assert_allclose(
                np.sum(bundle.p_plus, axis=0), traj.p_plus, atol=1e-12
            )
            np.testing.assert_allclose(
                np.sum(bundle.p_plus + bundle.p_minus, axis=0), 1.0, atol=1e-12
            )


class TestNZ2:
    def test_single_pair_analytic_solution(self):
        # N=1: each sector holds one (j=1/2) pair; the cosine-kernel Volterra
        # equation has the closed Laplace solution used here as the oracle
        p = SystemParams(N=1, A=0.12, omega0=0.9, initial_p_plus=0.8)
        t = np.linspace(0.0, 20.0, 201)
        traj = nz2_population_m(p, t, opts=SolveOptions(step=0.002))
        big_k = 8.0 * p.A**2 * (p.N + 1)
        w = np.array([0.5, 0.5])
        c = np.array([w[0] * 0.8 + w[1] * 0.2, w[1] * 0.8])
        d = np.array([1.0 * c[0] / 2.0, 2.0 * c[1] / 2.0])
        y0 = w * 0.8 - d
        omegas = np.array([p.omega0, p.omega0 + 4 * p.A])  # Omega_+(m) per sector
        s2 = omegas**2 + big_k
        y = y0[:, None] * (
            (omegas**2 / s2)[:, None]
            + (big_k / s2)[:, None] * np.cos(np.sqrt(s2)[:, None] * t[None, :])
        )
        expected = 0.8 + np.sum(y - y0[:, None], axis=0)
        np.testing.assert_allclose(traj.p_plus, expected, rtol=0, atol=1e-7)

    def test_jm_populations_reproduce_exact_dynamics(self):
        p = SystemParams(N=4, A=0.15, omega0=1.0, initial_p_plus=0.9)
        t = np.linspace(0.0, 30.0, 301)
        nz = nz2_jm(p, t)
        ex = exact_population_plus(p, t)
        np.testing.assert_allclose(nz.p_plus, ex.p_plus, rtol=0, atol=1e-9)

    def test_solver_method_independence(self):
        p = SystemParams(
            N=4, A=0.1, omega0=1.0, initial_p_plus=0.5, initial_coh=0.5
        )
        t = np.linspace(0.0, 10.0, 101)
        a = nz2_coherence_m(p, t, opts=SolveOptions(step=0.005, method="aux_ode"))
        q = nz2_coherence_m(p, t, opts=SolveOptions(step=0.005, method="quadrature"))
        np.testing.assert_allclose(a.coh, q.coh, rtol=0, atol=1e-6)


class TestStandardProjection:
    def test_printed_closed_form(self):
        p = SystemParams(
            N=101, A=coupling_from_alpha(101, 1.0, 0.5), omega0=1.0,
            initial_p_plus=1.0,
        )
        t = np.array([0.0, math.pi, 2.0 * math.pi])
        traj = standard_projection_population(p, t)
        rate = 8.0 * p.A**2 * 101.0
        np.testing.assert_allclose(
            traj.p_plus, [1.0, 0.5 * (1.0 + math.exp(-2.0 * rate)), 1.0], rtol=1e-14
        )
        np.testing.assert_allclose(traj.p_plus[1], 0.99507, atol=5e-6)

    def test_periodicity(self):
        p = SystemParams(N=21, A=0.03, omega0=1.3, initial_p_plus=1.0)
        period = 2.0 * math.pi / p.omega0
        traj = standard_projection_population(p, np.array([0.0, period, 2 * period]))
        np.testing.assert_allclose(traj.p_plus, 1.0, atol=1e-12)

    def test_requires_excited_start(self):
        p = SystemParams(N=4, A=0.1, omega0=1.0, initial_p_plus=0.5)
        with pytest.raises(ValueError, match="initial_p_plus"):
            standard_projection_population(p, np.array([0.0, 1.0]))


class TestFrameTransform:
    def test_phase_factor(self):
        # two_m = 2 (m = 1), A = 0.1, t = pi/0.4: phase exp(-2iA two_m t) = -1
        p = SystemParams(N=4, A=0.1, omega0=1.0)
        t = np.array([0.0, math.pi / 0.4])
        series = SectorSeries(
            p_plus=np.array([0.5, 0.5]), p_minus=np.array([0.5, 0.5]),
            coh=np.array([1.0 + 0.0j, 1.0 + 0.0j]),
        )
        out = to_rotating_frame(p, 2, t, series)
        np.testing.assert_allclose(out.coh, [1.0, -1.0], atol=1e-12)
        assert out.p_plus is series.p_plus  # populations untouched

    def test_zero_coupling_is_identity(self):
        p = SystemParams(N=4, A=0.0, omega0=1.0)
        t = np.linspace(0.0, 5.0, 6)
        series = SectorSeries(
            p_plus=np.ones(6), p_minus=np.zeros(6), coh=np.full(6, 0.3 + 0.1j)
        )
        out = to_rotating_frame(p, 4, t, series)
        np.testing.assert_array_equal(out.coh, series.coh)


class TestJMProjection:
    def test_stretched_sector_population_is_frozen(self):
        # b(j=N/2, m=N/2) = 0: the top sector has no partner and cannot decay
        p = SystemParams(N=4, A=0.2, omega0=1.0, initial_p_plus=0.6)
        t = np.linspace(0.0, 20.0, 41)
        for fn in (tcl2_jm, nz2_jm):
            _, bundle = fn(p, t, return_sectors=True)
            top = (bundle.two_j == 4) & (bundle.two_m == 4)
            (row,) = np.nonzero(top)
            np.testing.assert_allclose(
                bundle.p_plus[row[0]], bundle.p_plus[row[0], 0], atol=1e-12
            )

    def test_sector_sums_match_totals(self):
        traj, bundle = tcl2_jm(PARAMS, T, return_sectors=True)
        np.testing.assert_allclose(
            np.sum(bundle.p_plus, axis=0), traj.p_plus, atol=1e-12
        )
        np.testing.assert_allclose(np.sum(bundle.coh, axis=0), traj.coh, atol=1e-12)
