"""Lag-s autocovariance matrix, its normalized Gram matrix, and the spectrum pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensemble import EpsilonPanel
from .eigen import eigvals_sym
from .spectral_stats import Spectrum, SpectrumMeta


@dataclass
class AcvMatrix:
    p: int
    T: int
    lag: int
    X: np.ndarray = field(repr=False)


@dataclass
class GramMatrix:
    p: int
    T: int
    lag: int
    A: np.ndarray = field(repr=False)


def build_embeddings(panel: EpsilonPanel) -> tuple[np.ndarray, np.ndarray]:
    """Split the panel into the lagged pair (E1, E2), both p x T.

    E1 holds eps_1 .. eps_T and E2 holds eps_{s+1} .. eps_{s+T}.
    """
    E = panel.entries
    T, s = panel.T, panel.lag
    if E.shape != (panel.p, T + s):
        raise ValueError(f"panel entries have shape {E.shape}, expected {(panel.p, T + s)}")
    return E[:, :T], E[:, s:s + T]


def build_acv(E1: np.ndarray, E2: np.ndarray, T: int, lag: int = 0) -> AcvMatrix:
    """X = E2 E1^T / T, i.e. X[i, j] = (1/T) sum_t eps[i, t+s] eps[j, t]."""
    if E1.shape != E2.shape or E1.shape[1] != T:
        raise ValueError(f"embeddings must both be p x {T}: {E1.shape}, {E2.shape}")
    X = (E2 @ E1.T) / T
    return AcvMatrix(E1.shape[0], T, lag, X)


def normalized_gram(acv: AcvMatrix) -> GramMatrix:
    """A = (T/p) X X^T, symmetrized as (A + A^T)/2."""
    X = acv.X
    A = (acv.T / acv.p) * (X @ X.T)
    A = 0.5 * (A + A.T)
    return GramMatrix(acv.p, acv.T, acv.lag, A)


def gram_from_panel(panel: EpsilonPanel) -> GramMatrix:
    E1, E2 = build_embeddings(panel)
    return normalized_gram(build_acv(E1, E2, panel.T, panel.lag))


def spectrum_pipeline(panel: EpsilonPanel) -> Spectrum:
    """Eigenvalues of A for one panel, ascending and clamped at zero."""
    gram = gram_from_panel(panel)
    values = eigvals_sym(gram.A, psd=True)
    meta = SpectrumMeta(
        p=panel.p,
        T=panel.T,
        lag=panel.lag,
        dist=panel.dist.tag if panel.dist is not None else "",
        seed=panel.seed,
    )
    return Spectrum(values, meta)
