import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from opaherald.errors import InvalidGain
from opaherald.fock import Truncation, coherent_state, number_state
from opaherald.heralded import (
    closed_output,
    gain_displaced_number,
    gain_orthogonal_photon_added,
    q_zero_location,
)
from opaherald.observables import (
    Q_MAX,
    MomentReport,
    default_window,
    locate_q_zero,
    locate_q_zeros,
    pacs_overlap_closed,
    photon_moments_closed,
    photon_moments_numeric,
    q_function,
    q_values,
    reference_projections,
)

G0 = gain_displaced_number(2.0)
G1 = gain_orthogonal_photon_added(2.0)

alphas = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)
gains = st.floats(min_value=1.0, max_value=6.0)


class TestQFunction:
    def test_coherent_peak(self):
        state = coherent_state(2.0, Truncation(60))
        grid = q_function(state)
        assert grid.argmax() == pytest.approx(2.0, abs=1e-12)
        assert grid.values.max() == pytest.approx(Q_MAX, rel=1e-12)

    def test_coherent_matches_gaussian(self):
        alpha = 1 - 0.5j
        state = coherent_state(alpha, Truncation(60))
        gammas = np.array([0, 1j, 2 + 1j, -1.5])
        expected = np.exp(-np.abs(gammas - alpha) ** 2) / math.pi
        np.testing.assert_allclose(q_values(state, gammas), expected, rtol=1e-12)

    def test_riemann_normalization(self):
        grid = q_function(coherent_state(2.0, Truncation(60)), (-6, 6, -6, 6), 241, 241)
        assert abs(grid.integral() - 1.0) < 1e-3

    def test_displaced_photon_ring(self):
        out = closed_output(2.0, G0)
        grid = q_function(out.psi, default_window(2.0))
        ring = abs(grid.argmax() - out.beta)
        assert ring == pytest.approx(1.0, abs=0.1)
        zero = locate_q_zero(out.psi, grid)
        assert zero[0] == pytest.approx(math.sqrt(3), abs=1e-6)

    def test_grid_layout(self):
        grid = q_function(number_state(0, Truncation(30)), (-1, 1, -2, 2), 3, 5)
        assert grid.values.shape == (5, 3)
        np.testing.assert_allclose(grid.ys, [-2, -1, 0, 1, 2])
        assert grid.cell_area == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "bounds,nodes",
        [((-1, 1, 1, -1), 5), ((0, math.inf, 0, 1), 5), ((-1, 1, -1, 1), 1)],
    )
    def test_bad_grid(self, bounds, nodes):
        with pytest.raises(ValueError):
            q_function(number_state(0, Truncation(30)), bounds, nodes, 5)

    def test_coherent_has_no_zero(self):
        state = coherent_state(1.5, Truncation(60))
        assert locate_q_zeros(state, q_function(state, nx=61, ny=61)) == []

    @settings(max_examples=20, deadline=None)
    @given(alphas, gains)
    def test_bounded(self, alpha, g):
        psi = closed_output(alpha, g).psi
        values = q_function(psi, default_window(alpha), 41, 41).values
        assert values.min() >= 0
        assert values.max() <= Q_MAX + 1e-12

    @pytest.mark.parametrize("g", [1.111, 1.154, 1.195, 1.5])
    def test_zero_consistency(self, g):
        psi = closed_output(2.0, g).psi
        gamma, q = locate_q_zero(psi, q_function(psi, default_window(2.0)))
        assert q < 1e-12
        assert gamma == pytest.approx(q_zero_location(2.0, g), abs=1e-6)


class TestProjections:
    @pytest.mark.parametrize("alpha", [0.5, 2.0, 1 + 1j])
    def test_unity_gain(self, alpha):
        x = abs(alpha) ** 2
        p = reference_projections(alpha, 1.0)
        assert p.p_coh == pytest.approx(1.0, abs=1e-12)
        assert p.p_pacs == pytest.approx(x / (1 + x), abs=1e-12)
        assert p.p_disp == pytest.approx(0.0, abs=1e-12)

    def test_at_g0(self):
        p = reference_projections(2.0, G0)
        assert p.p_coh < 1e-12
        assert p.p_disp > 1 - 1e-10

    def test_at_g1(self):
        assert reference_projections(2.0, G1).p_pacs < 1e-12

    def test_invalid_gain(self):
        with pytest.raises(InvalidGain):
            reference_projections(2.0, 0.9)

    @settings(max_examples=40, deadline=None)
    @given(alphas, gains)
    def test_two_state_completeness(self, alpha, g):
        p = reference_projections(alpha, g)
        assert p.p_coh + p.p_disp == pytest.approx(1.0, abs=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(alphas, gains)
    def test_pacs_closed_form(self, alpha, g):
        assert reference_projections(alpha, g).p_pacs == pytest.approx(pacs_overlap_closed(alpha, g), abs=1e-10)

    def test_pacs_large_gain(self):
        assert pacs_overlap_closed(10.0, 5.0) > 0.9999


class TestMoments:
    def test_report_variance(self):
        assert MomentReport(2.0, 5.0).variance == 1.0

    def test_number_state(self):
        m = photon_moments_numeric(number_state(3, Truncation(30)))
        assert (m.mean_n, m.variance) == (3.0, 0.0)

    def test_coherent(self):
        m = photon_moments_numeric(coherent_state(2.0, Truncation(60)))
        assert m.mean_n == pytest.approx(4.0, abs=1e-9)
        assert m.variance == pytest.approx(4.0, abs=1e-9)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 1 - 2j])
    def test_unity_gain_is_poisson(self, alpha):
        m = photon_moments_closed(alpha, 1.0)
        assert m.mean_n == pytest.approx(abs(alpha) ** 2, rel=1e-14)
        assert m.variance == pytest.approx(abs(alpha) ** 2, rel=1e-12)

    def test_at_g0(self):
        m = photon_moments_closed(2.0, G0)
        assert m.mean_n == pytest.approx(4.0, abs=1e-12)
        assert m.variance == pytest.approx(9.0, abs=1e-10)

    def test_high_gain(self):
        m = photon_moments_closed(2.0, 20.0)
        assert abs(m.mean_n - 1) < 0.05
        assert m.variance < 0.1

    @settings(max_examples=60, deadline=None)
    @given(alphas, gains)
    def test_closed_matches_numeric(self, alpha, g):
        closed = photon_moments_closed(alpha, g)
        numeric = photon_moments_numeric(closed_output(alpha, g).psi)
        assert closed.mean_n == pytest.approx(numeric.mean_n, abs=1e-8)
        assert closed.second_moment == pytest.approx(numeric.second_moment, abs=1e-8)
        assert closed.variance >= -1e-12


class TestGainCurves:
    """Shape of mean and variance vs gain at alpha = 2."""

    gains = np.linspace(1.001, 3.0, 2000)

    def curves(self):
        ms = [photon_moments_closed(2.0, g) for g in self.gains]
        return np.array([m.mean_n for m in ms]), np.array([m.variance for m in ms])

    def test_mean_dips_below_input_before_g0(self):
        mean, _ = self.curves()
        below = self.gains < G0
        i = int(np.argmin(mean[below]))
        assert 1.0 < self.gains[i] < G0
        assert mean[i] < 4.0
        assert 0 < i < below.sum() - 1

    def test_mean_tends_to_one(self):
        mean, _ = self.curves()
        assert mean[-1] < mean[self.gains < G0].min()

    def test_mean_peak_location(self):
        # the closed-form maximizer is also the maximum of the Fock-sum moments
        res = minimize_scalar(lambda g: -photon_moments_closed(2.0, g).mean_n, bounds=(1.16, 1.5), method="bounded")
        g_star = res.x
        assert 1.22 < g_star < 1.23
        peak = photon_moments_numeric(closed_output(2.0, g_star).psi).mean_n
        for dg in (-0.01, 0.01):
            assert photon_moments_numeric(closed_output(2.0, g_star + dg).psi).mean_n < peak

    def test_variance_peak_near_g0(self):
        _, var = self.curves()
        g_peak = self.gains[int(np.argmax(var))]
        assert abs(g_peak / G0 - 1) < 0.05
        assert var[-1] < var.max()
