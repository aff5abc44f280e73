import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opaherald.errormodel import (
    OUTCOMES,
    ErrorModel,
    fidelity_full,
    fidelity_lower_bound,
    outcome_state,
    outcome_table,
)
from opaherald.errors import InvalidModel
from opaherald.fock import coherent_state, overlap_sq
from opaherald.heralded import closed_output, gain_displaced_number, photon_added_state

G0 = gain_displaced_number(2.0)


@st.composite
def models(draw):
    d = draw(st.floats(min_value=0.0, max_value=0.5))
    l = draw(st.floats(min_value=0.0, max_value=min(1.0 - d, 0.999)))  # noqa: E741
    return ErrorModel(d, l)


@pytest.fixture(scope="module")
def table_g0():
    return outcome_table(2.0, G0, ErrorModel(0.0, 0.0))


class TestErrorModel:
    @pytest.mark.parametrize("d,l", [(-0.1, 0), (0.6, 0), (0, 1.0), (0, -1e-9), (math.nan, 0), (0.5, 0.6)])
    def test_invalid(self, d, l):
        with pytest.raises(InvalidModel):
            ErrorModel(d, l)

    def test_weights_by_detector(self):
        m = ErrorModel(0.1, 0.2)
        assert m.weight(0, 0) == pytest.approx(0.01)
        assert m.weight(1, 1) == pytest.approx(0.9 * 0.7)
        assert m.weight(1, 2) == pytest.approx(0.9 * 0.2)

    @settings(max_examples=200)
    @given(models())
    def test_weight_sums(self, m):
        lower = sum(m.weight(j, k) for j, k in OUTCOMES if k < 2)
        full = sum(m.weight(j, k) for j, k in OUTCOMES)
        assert lower == pytest.approx(1 - m.l, abs=1e-12)
        assert full == pytest.approx(1.0, abs=1e-12)
        assert all(m.weight(j, k) >= 0 for j, k in OUTCOMES)


class TestOutcomeStates:
    def test_zero_zero_is_attenuated(self):
        s = outcome_state(0, 0, 2.0, 1.4)
        assert overlap_sq(coherent_state(2.0 / 1.4, s.trunc), s) == pytest.approx(1.0, abs=1e-12)

    def test_zero_one_is_photon_added(self):
        s = outcome_state(0, 1, 2.0, 1.4)
        assert overlap_sq(photon_added_state(2.0 / 1.4, s.trunc), s) == pytest.approx(1.0, abs=1e-12)

    def test_zero_two_is_two_photon_added(self):
        s = outcome_state(0, 2, 2.0, 1.4)
        assert overlap_sq(photon_added_state(2.0 / 1.4, s.trunc, k=2), s) >= 1 - 1e-8

    @pytest.mark.parametrize("g", [1.05, G0, 2.0])
    def test_one_one_is_ideal(self, g):
        s = outcome_state(1, 1, 2.0, g)
        assert overlap_sq(closed_output(2.0, g, s.trunc).psi, s) >= 1 - 1e-8

    def test_unknown_outcome(self):
        with pytest.raises(ValueError):
            outcome_state(2, 0, 2.0, 1.2)

    def test_unity_gain_table(self):
        table = outcome_table(1.0, 1.0, ErrorModel(0.1, 0.1))
        assert table[(1, 0)].state is None and table[(1, 0)].overlap_sq == 0.0
        assert table[(1, 1)].overlap_sq == pytest.approx(1.0)
        assert table[(0, 0)].overlap_sq == pytest.approx(1.0)

    def test_overlaps_in_unit_interval(self, table_g0):
        for jk in OUTCOMES:
            assert 0.0 <= table_g0[jk].overlap_sq <= 1.0
            assert table_g0[jk].state.norm_sq == pytest.approx(1.0, abs=1e-12)


class TestFidelity:
    def test_perfect_detectors(self):
        assert fidelity_lower_bound(2.0, G0, ErrorModel(0, 0)) == pytest.approx(1.0, abs=1e-12)
        assert fidelity_full(2.0, G0, ErrorModel(0, 0)) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("l", [0.05, 0.2, 0.5])
    def test_loss_only(self, l):
        assert fidelity_lower_bound(2.0, G0, ErrorModel(0, l)) == pytest.approx(1 - l, abs=1e-12)

    def test_monotone_in_dark_counts(self):
        for l in (0.0, 0.2, 0.5):
            f = [fidelity_lower_bound(2.0, G0, ErrorModel(d, l)) for d in np.linspace(0, 0.5, 11)]
            assert np.all(np.diff(f) <= 1e-12)

    def test_full_at_least_lower(self, table_g0):
        # reuse the outcome overlaps; only the weights depend on (d, l)
        for d in np.linspace(0, 0.5, 11):
            for l in np.linspace(0, 0.5, 11):
                m = ErrorModel(d, l)
                lower = sum(m.weight(j, k) * table_g0[(j, k)].overlap_sq for j, k in OUTCOMES if k < 2)
                full = sum(m.weight(j, k) * table_g0[(j, k)].overlap_sq for j, k in OUTCOMES)
                assert full >= lower

    @pytest.mark.parametrize("d,l", [(0.1, 0.3), (0.5, 0.5)])
    def test_full_at_least_lower_api(self, d, l):
        m = ErrorModel(d, l)
        assert fidelity_full(2.0, G0, m) >= fidelity_lower_bound(2.0, G0, m)

    @pytest.mark.parametrize("d", [0.0, 0.1, 0.4])
    def test_no_loss_adds_nothing(self, d):
        m = ErrorModel(d, 0.0)
        assert fidelity_full(2.0, 1.3, m) == fidelity_lower_bound(2.0, 1.3, m)

    def test_two_photon_gap(self):
        m = ErrorModel(1e-6, 0.05)
        table = outcome_table(2.0, 1.154, m)
        gap = fidelity_full(2.0, 1.154, m) - fidelity_lower_bound(2.0, 1.154, m)
        bound = m.l * max(table[(0, 2)].overlap_sq, table[(1, 2)].overlap_sq)
        assert 0 <= gap < bound

    def test_model_type_checked(self):
        with pytest.raises(InvalidModel):
            fidelity_lower_bound(2.0, G0, (0.1, 0.1))
        with pytest.raises(InvalidModel):
            fidelity_full(2.0, G0, None)
