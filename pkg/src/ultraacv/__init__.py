"""Spectra of lag-s sample autocovariance matrices when p/T -> 0."""

from .acv import build_acv, build_embeddings, normalized_gram, spectrum_pipeline
from .combinatorics import (
    catalan, count_dyck_paths, iso_class_bound, iso_class_bound_t1, iso_class_count,
    moment_formula,
)
from .eigen import eig_tridiagonal, eigvals_sym, jacobi_eigvals, tridiagonalize
from .ensemble import (
    EntryDistribution, EpsilonPanel, Family, entry_moment, make_sampler, sample_panel,
    truncate_spec,
)
from .harness import RunConfig, SweepConfig, run_single, run_sweep
from .laws import LimitLaw, law_cdf, law_moment, law_pdf, law_quantile, stieltjes_squared
from .spectral_stats import Spectrum, empirical_moment, extremes, histogram, ks_distance
from .verify import verify_suite

__version__ = "0.1.0"
