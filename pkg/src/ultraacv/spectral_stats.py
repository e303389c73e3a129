"""Empirical spectral statistics of a single spectrum."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .combinatorics import catalan
from .errors import DomainError
from .laws import LimitLaw, law_cdf, law_pdf

ZERO_TOL = 1e-10
DEFAULT_BINS = 64
RANGE_FLOOR = 4.5


@dataclass(frozen=True)
class SpectrumMeta:
    p: int = 0
    T: int = 0
    lag: int = 0
    dist: str = ""
    seed: int = 0


@dataclass
class Spectrum:
    values: np.ndarray
    meta: SpectrumMeta = field(default_factory=SpectrumMeta)

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=np.float64))
        if v.size and v[0] < 0:
            raise DomainError(f"spectrum has a negative value {v[0]}")
        self.values = v

    def __len__(self):
        return len(self.values)

    @property
    def singular_values(self) -> np.ndarray:
        """Singular values of sqrt(T/p) X, the square roots of the eigenvalues."""
        return np.sqrt(self.values)

    def sqrt(self) -> "Spectrum":
        return Spectrum(self.singular_values, self.meta)


def _values(spec) -> np.ndarray:
    v = spec.values if isinstance(spec, Spectrum) else np.sort(np.asarray(spec, dtype=np.float64))
    if v.size == 0:
        raise DomainError("empty spectrum")
    return v


def ks_distance(spec: Spectrum | Sequence[float], law: LimitLaw) -> float:
    """sup |F_n - F| evaluated exactly at the sorted sample points."""
    v = _values(spec)
    n = v.size
    F = law_cdf(law, v)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))


def ks_two_sample(a: Spectrum | Sequence[float], b: Spectrum | Sequence[float]) -> float:
    """sup |F_a - F_b| between two empirical cdfs."""
    x, y = _values(a), _values(b)
    grid = np.concatenate([x, y])
    Fa = np.searchsorted(x, grid, side="right") / x.size
    Fb = np.searchsorted(y, grid, side="right") / y.size
    return float(np.max(np.abs(Fa - Fb)))


def empirical_moment(spec: Spectrum | Sequence[float], k: int) -> float:
    """(1/p) sum lambda_i**k, i.e. (1/p) tr A**k."""
    if k < 1:
        raise DomainError(f"moment order must be >= 1, got {k}")
    v = _values(spec)
    if k == 1:
        return float(np.mean(v))
    return float(np.mean(v**k))


@dataclass
class MomentReport:
    orders: list[int]
    empirical: list[float]
    theoretical: list[int]
    deviation: list[float]


def moment_report(spec: Spectrum, orders: Sequence[int] = range(1, 7)) -> MomentReport:
    orders = list(orders)
    emp = [empirical_moment(spec, k) for k in orders]
    theo = [catalan(k) for k in orders]
    return MomentReport(orders, emp, theo, [e - t for e, t in zip(emp, theo)])


def extremes(spec: Spectrum | Sequence[float]) -> tuple[float, float | None]:
    """(largest value, smallest value above the zero threshold or None)."""
    v = _values(spec)
    lam_max = float(v[-1])
    tol = ZERO_TOL * max(1.0, lam_max)
    pos = v[v > tol]
    return lam_max, (float(pos[0]) if pos.size else None)


@dataclass
class HistogramTable:
    edges: np.ndarray
    counts: np.ndarray
    emp_density: np.ndarray
    theory_density: np.ndarray

    def rows(self):
        for i in range(len(self.counts)):
            yield (float(self.edges[i]), float(self.edges[i + 1]), int(self.counts[i]),
                   float(self.emp_density[i]), float(self.theory_density[i]))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count", "emp_density", "theory_density"])
        for lo, hi, c, e, t in self.rows():
            w.writerow([repr(lo), repr(hi), c, repr(e), repr(t)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def histogram(
    spec: Spectrum | Sequence[float],
    bins: int = DEFAULT_BINS,
    law: LimitLaw = LimitLaw.SQUARED,
) -> HistogramTable:
    """Equal-width bins on [0, max(4.5, lambda_max)] with the law's density at midpoints."""
    if bins < 1:
        raise DomainError(f"bins must be >= 1, got {bins}")
    v = _values(spec)
    hi = max(RANGE_FLOOR, float(v[-1]))
    edges = np.linspace(0.0, hi, bins + 1)
    counts, _ = np.histogram(v, bins=edges)
    width = hi / bins
    emp = counts / (v.size * width)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return HistogramTable(edges, counts, emp, np.asarray(law_pdf(law, mids)))
