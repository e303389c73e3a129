import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ultraacv.acv import spectrum_pipeline
from ultraacv.ensemble import GAUSSIAN, make_sampler, mix64, sample_panel
from ultraacv.errors import DomainError
from ultraacv.laws import LimitLaw, law_cdf, law_quantile
from ultraacv.spectral_stats import (
    Spectrum, empirical_moment, extremes, histogram, ks_distance, ks_two_sample, moment_report,
)

SQ = LimitLaw.SQUARED


def brute_ks(values, law, grid=200001):
    """KS via a dense grid plus one-sided limits at each sample point."""
    v = np.sort(values)
    xs = np.concatenate([np.linspace(-0.5, 4.5, grid), v])
    Fn = np.searchsorted(v, xs, side="right") / v.size
    Fn_left = np.searchsorted(v, xs, side="left") / v.size
    F = law_cdf(law, xs)
    return max(np.max(np.abs(Fn - F)), np.max(np.abs(Fn_left - F)))


class TestSpectrum:
    def test_sorted(self):
        assert Spectrum([3.0, 1.0, 2.0]).values.tolist() == [1.0, 2.0, 3.0]

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            Spectrum([1.0, -0.1])

    def test_singular_values(self):
        s = Spectrum([4.0, 1.0])
        assert s.singular_values.tolist() == [1.0, 2.0]
        assert s.sqrt().values.tolist() == [1.0, 2.0]


class TestKS:
    def test_at_midpoint_quantiles(self):
        p = 100
        v = [law_quantile(SQ, (i - 0.5) / p) for i in range(1, p + 1)]
        assert ks_distance(v, SQ) == pytest.approx(1 / (2 * p), abs=1e-9)

    def test_all_zeros(self):
        assert ks_distance([0.0] * 10, SQ) == pytest.approx(1.0, abs=1e-12)

    def test_empty(self):
        with pytest.raises(DomainError):
            ks_distance([], SQ)

    def test_quarter_matches_squared_for_square_roots(self):
        rng = np.random.default_rng(0)
        v = rng.uniform(0, 4, 50)
        assert ks_distance(np.sqrt(v), LimitLaw.QUARTER) == pytest.approx(ks_distance(v, SQ), abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0, 5, allow_nan=False), min_size=1, max_size=30))
    def test_against_grid_oracle(self, v):
        assert ks_distance(v, SQ) == pytest.approx(brute_ks(np.array(v), SQ), abs=1e-9)

    def test_two_sample_identical(self):
        assert ks_two_sample([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]) == 0.0

    def test_two_sample_disjoint(self):
        assert ks_two_sample([0.0, 1.0], [5.0, 6.0]) == 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0, 4), min_size=1, max_size=20),
           st.lists(st.floats(0, 4), min_size=1, max_size=20))
    def test_triangle(self, a, b):
        d = ks_two_sample(a, b)
        assert d <= ks_distance(a, SQ) + ks_distance(b, SQ) + 1e-12
        assert ks_two_sample(b, a) == pytest.approx(d)


class TestMoments:
    def test_ones(self):
        assert empirical_moment([1.0, 1.0, 1.0], 5) == 1.0

    def test_matrix_power(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((4, 4))
        A = X @ X.T
        lam = np.linalg.eigvalsh(A)
        for k in (1, 2, 3, 4):
            assert empirical_moment(np.clip(lam, 0, None), k) == pytest.approx(
                np.trace(np.linalg.matrix_power(A, k)) / 4, rel=1e-10)

    def test_order_domain(self):
        with pytest.raises(DomainError):
            empirical_moment([1.0], 0)

    def test_report(self):
        r = moment_report(Spectrum([1.0, 1.0]), range(1, 4))
        assert r.theoretical == [1, 2, 5]
        assert r.deviation == [0.0, -1.0, -4.0]


class TestExtremes:
    def test_basic(self):
        assert extremes([0.0, 0.5, 3.0]) == (3.0, 0.5)

    def test_all_zero(self):
        assert extremes([0.0, 0.0]) == (0.0, None)

    def test_round_off_zero_skipped(self):
        assert extremes([1e-14, 0.2, 2.0]) == (2.0, 0.2)


class TestHistogram:
    def test_partition(self):
        rng = np.random.default_rng(1)
        v = rng.uniform(0, 4, 500)
        h = histogram(v, 32)
        assert h.counts.sum() == 500
        width = h.edges[1] - h.edges[0]
        assert np.sum(h.emp_density) * width == pytest.approx(1.0)
        assert h.edges[0] == 0.0 and h.edges[-1] == 4.5

    def test_range_extends(self):
        assert histogram([1.0, 6.0], 4).edges[-1] == 6.0

    def test_single_bin(self):
        h = histogram([1.0, 2.0, 3.0], 1)
        assert h.counts.tolist() == [3]
        assert h.emp_density[0] == pytest.approx(1 / 4.5)

    def test_theory_density_midpoints(self):
        h = histogram([1.0], 9)
        mids = 0.5 * (h.edges[:-1] + h.edges[1:])
        ref = [math.sqrt(1 / x - 0.25) / math.pi if x < 4 else 0.0 for x in mids]
        assert np.allclose(h.theory_density, ref)

    def test_csv(self, tmp_path):
        h = histogram([1.0, 2.0], 3)
        text = h.to_csv(tmp_path / "h.csv")
        lines = text.splitlines()
        assert lines[0] == "bin_lo,bin_hi,count,emp_density,theory_density"
        assert len(lines) == 4
        assert (tmp_path / "h.csv").read_text() == text

    def test_bins_domain(self):
        with pytest.raises(DomainError):
            histogram([1.0], 0)


def _gaussian_spectra(p, T, reps, base=0):
    s = make_sampler(GAUSSIAN)
    return [spectrum_pipeline(sample_panel(s, p, T, 1, mix64(base, r))) for r in range(reps)]


@pytest.mark.slow
def test_lambda_max_window():
    specs = _gaussian_spectra(64, 6400, 8)
    med = float(np.median([extremes(s)[0] for s in specs]))
    assert 3.2 <= med <= 4.6


@pytest.mark.slow
def test_histogram_tracks_density():
    pooled = Spectrum(np.concatenate([s.values for s in _gaussian_spectra(64, 10240, 8)]))
    h = histogram(pooled, 16)
    assert np.mean(np.abs(h.emp_density - h.theory_density)) < 0.15
