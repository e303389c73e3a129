"""Entry distributions and counter-based sampling of epsilon panels.

Every entry eps[i, t] of a panel is a pure function of ``(seed, i, t)``:
a splitmix64-style finalizer hashes the triple into 64 random bits, the
top 53 bits become a uniform on (0, 1), and a per-family inverse CDF maps
that uniform to a standardized draw.  Panels are therefore reproducible
bit-for-bit and independent of fill order or chunking.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import special

from .errors import (
    ConfigurationError,
    DegenerateTruncationError,
    DomainError,
    ResourceError,
)
from .quadrature import integrate

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MAX_PANEL_ENTRIES = 1 << 27

_TRUNC_QUAD_TOL = 1e-12
_DEGENERATE_VAR = 1e-12


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"
    STUDENT_T = "student_t"


# --------------------------------------------------------------------------
# 64-bit mixing
# --------------------------------------------------------------------------

def _fmix_int(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(a: int, b: int) -> int:
    """Hash two unsigned 64-bit integers into one (used for replication seeds)."""
    return _fmix_int(_fmix_int(a & MASK64) ^ (b & MASK64))


def _fmix_array(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps modulo 2**64, which is what we want.
    z = z + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def hash_counters(seed: int, counters: np.ndarray) -> np.ndarray:
    """64 random bits per counter; two finalizer rounds keyed by the seed."""
    key = np.uint64(_fmix_int(seed & MASK64))
    h = _fmix_array(np.asarray(counters, dtype=np.uint64) ^ key)
    return _fmix_array(h + key)


def uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Open-interval uniforms ((bits >> 11) + 1/2) * 2**-53, never 0 or 1."""
    bits = hash_counters(seed, counters) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * 2.0**-53


# --------------------------------------------------------------------------
# Normal quantile (Acklam's rational approximation, relative error < 1.2e-9)
# --------------------------------------------------------------------------

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _tail(q):
    num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
    return num / den


def normal_quantile(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)

    lo = u < _P_LOW
    hi = u > 1.0 - _P_LOW
    mid = ~(lo | hi)

    q = u[mid] - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    out[mid] = num / den

    out[lo] = _tail(np.sqrt(-2.0 * np.log(u[lo])))
    out[hi] = -_tail(np.sqrt(-2.0 * np.log1p(-u[hi])))
    return out


# --------------------------------------------------------------------------
# Distributions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EntryDistribution:
    """Law of the standardized entries, optionally truncated.

    ``truncate_at`` applies the transform eps -> (eps 1{|eps| <= c} - mu) / sigma
    to the already standardized base law, where mu and sigma**2 are the mean
    and variance of the truncated variable.
    """

    family: Family
    nu: float | None = None
    truncate_at: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.STUDENT_T:
            if self.nu is None or not self.nu > 4:
                raise ConfigurationError(f"student_t requires nu > 4, got {self.nu}")
        elif self.nu is not None:
            raise ConfigurationError(f"nu is only meaningful for student_t ({self.family.value})")
        if self.truncate_at is not None and not self.truncate_at > 0:
            raise ConfigurationError(f"truncation threshold must be > 0, got {self.truncate_at}")

    @property
    def tag(self) -> str:
        s = self.family.value
        if self.nu is not None:
            s += f"({self.nu:g})"
        if self.truncate_at is not None:
            s += f"@{self.truncate_at:.6g}"
        return s

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"family": self.family.value}
        if self.nu is not None:
            d["nu"] = self.nu
        if self.truncate_at is not None:
            d["truncate_at"] = self.truncate_at
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EntryDistribution":
        unknown = set(d) - {"family", "nu", "truncate_at"}
        if unknown:
            raise ConfigurationError(f"unknown distribution keys: {sorted(unknown)}")
        try:
            family = Family(d["family"])
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"bad distribution family in {d!r}") from exc
        return cls(family, d.get("nu"), d.get("truncate_at"))

    @classmethod
    def parse(cls, text: str) -> "EntryDistribution":
        """Parse ``family[:nu][@threshold]``, e.g. ``student_t:5@2.83``."""
        text = text.strip()
        threshold = None
        if "@" in text:
            text, thr = text.split("@", 1)
            threshold = _parse_float(thr)
        nu = None
        if ":" in text:
            text, nu_s = text.split(":", 1)
            nu = _parse_float(nu_s)
        try:
            family = Family(text.lower())
        except ValueError as exc:
            raise ConfigurationError(f"unknown distribution family {text!r}") from exc
        return cls(family, nu, threshold)


def _parse_float(s: str) -> float:
    try:
        return float(s)
    except ValueError as exc:
        raise ConfigurationError(f"not a number: {s!r}") from exc


GAUSSIAN = EntryDistribution(Family.GAUSSIAN)
RADEMACHER = EntryDistribution(Family.RADEMACHER)
UNIFORM = EntryDistribution(Family.UNIFORM)


def student_t(nu: float) -> EntryDistribution:
    return EntryDistribution(Family.STUDENT_T, nu)


def _t_scale(nu: float) -> float:
    return math.sqrt((nu - 2.0) / nu)


def _base_density(dist: EntryDistribution):
    """Density of the untruncated standardized law (continuous families only)."""
    if dist.family is Family.GAUSSIAN:
        return lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    if dist.family is Family.UNIFORM:
        h = 1.0 / (2.0 * math.sqrt(3.0))
        return lambda x: np.where(np.abs(x) <= math.sqrt(3.0), h, 0.0)
    if dist.family is Family.STUDENT_T:
        nu, a = dist.nu, _t_scale(dist.nu)
        logc = (special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2)
                - 0.5 * math.log(nu * math.pi))
        return lambda x: np.exp(logc - (nu + 1) / 2 * np.log1p((x / a) ** 2 / nu)) / a
    raise AssertionError(dist.family)


def _truncated_mean_var(dist: EntryDistribution, c: float) -> tuple[float, float]:
    """Mean and variance of eps 1{|eps| <= c} for the standardized base law."""
    fam = dist.family
    # All supported families are symmetric, so the truncated mean is zero.
    mu = 0.0
    if fam is Family.GAUSSIAN:
        second = math.erf(c / math.sqrt(2)) - 2 * c * math.exp(-0.5 * c * c) / math.sqrt(2 * math.pi)
    elif fam is Family.RADEMACHER:
        second = 1.0 if c >= 1.0 else 0.0
    elif fam is Family.UNIFORM:
        r3 = math.sqrt(3.0)
        second = 1.0 if c >= r3 else c**3 / (3 * r3)
    else:
        dens = _base_density(dist)
        half, _ = integrate(lambda x: x * x * dens(x), 0.0, c,
                            abs_tol=_TRUNC_QUAD_TOL, rel_tol=_TRUNC_QUAD_TOL)
        second = min(2.0 * half, 1.0)
    return mu, second - mu * mu


def truncate_spec(dist: EntryDistribution, threshold: float) -> EntryDistribution:
    """Return ``dist`` truncated at ``threshold`` then re-centred and re-scaled."""
    if dist.truncate_at is not None:
        raise ConfigurationError(f"{dist.tag} is already truncated")
    if not threshold > 0:
        raise ConfigurationError(f"truncation threshold must be > 0, got {threshold}")
    out = replace(dist, truncate_at=float(threshold))
    make_sampler(out)  # surfaces DegenerateTruncationError eagerly
    return out


def default_eta(T: int) -> float:
    """eta = T**(-1/8), so the LSD-side threshold eta T**(1/4) equals T**(1/8)."""
    return T ** (-1.0 / 8.0)


def default_delta(T: int) -> float:
    """delta = T**(-1/4), so the edge-side threshold delta T**(1/2) equals T**(1/4).

    Only some of the growth conditions placed on delta are met by this choice;
    it is a convenience default, not a guarantee.
    """
    return T ** (-1.0 / 4.0)


def lsd_threshold(T: int, eta: float | None = None) -> float:
    eta = default_eta(T) if eta is None else eta
    return eta * T ** 0.25


def edge_threshold(T: int, delta: float | None = None) -> float:
    delta = default_delta(T) if delta is None else delta
    return delta * T ** 0.5


# --------------------------------------------------------------------------
# Samplers and panels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EntrySampler:
    """Stateless map from (seed, counter) to standardized draws."""

    dist: EntryDistribution
    trunc_mean: float = 0.0
    trunc_std: float = 1.0

    @property
    def support_bound(self) -> float | None:
        if self.dist.truncate_at is not None:
            return (self.dist.truncate_at + abs(self.trunc_mean)) / self.trunc_std
        if self.dist.family is Family.RADEMACHER:
            return 1.0
        if self.dist.family is Family.UNIFORM:
            return math.sqrt(3.0)
        return None

    def from_uniforms(self, u: np.ndarray) -> np.ndarray:
        fam = self.dist.family
        if fam is Family.GAUSSIAN:
            x = normal_quantile(u)
        elif fam is Family.RADEMACHER:
            x = np.where(u < 0.5, -1.0, 1.0)
        elif fam is Family.UNIFORM:
            x = (2.0 * u - 1.0) * math.sqrt(3.0)
        else:
            x = special.stdtrit(self.dist.nu, u) * _t_scale(self.dist.nu)
        c = self.dist.truncate_at
        if c is not None:
            x = (np.where(np.abs(x) <= c, x, 0.0) - self.trunc_mean) / self.trunc_std
        return x

    def draw(self, seed: int, counters: np.ndarray) -> np.ndarray:
        return self.from_uniforms(uniforms(seed, counters))

    def stream(self, seed: int, n: int, start: int = 0) -> np.ndarray:
        """Draws at stream positions ``start .. start+n-1``."""
        return self.draw(seed, np.arange(start, start + n, dtype=np.uint64))


def make_sampler(dist: EntryDistribution) -> EntrySampler:
    if dist.truncate_at is None:
        return EntrySampler(dist)
    mu, var = _truncated_mean_var(dist, dist.truncate_at)
    if var < _DEGENERATE_VAR:
        raise DegenerateTruncationError(
            f"truncating {dist.family.value} at {dist.truncate_at} leaves variance {var:.3g}"
        )
    return EntrySampler(dist, mu, math.sqrt(var))


@dataclass
class EpsilonPanel:
    p: int
    T: int
    lag: int
    seed: int
    entries: np.ndarray = field(repr=False)
    dist: EntryDistribution | None = None

    @property
    def horizon(self) -> int:
        return self.T + self.lag


def panel_counters(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.uint64)
    cols = np.asarray(cols, dtype=np.uint64)
    return (rows[:, None] << np.uint64(32)) | cols[None, :]


def sample_panel(
    sampler: EntrySampler,
    p: int,
    T: int,
    lag: int,
    seed: int,
    max_entries: int | None = None,
) -> EpsilonPanel:
    """Sample the p x (T + lag) panel; entry (i, t) depends on (seed, i, t) only."""
    if p < 1 or T < 1 or lag < 0:
        raise ConfigurationError(f"need p >= 1, T >= 1, lag >= 0 (got {p}, {T}, {lag})")
    if not 0 <= seed <= MASK64:
        raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    horizon = T + lag
    cap = MAX_PANEL_ENTRIES if max_entries is None else max_entries
    if p * horizon > cap:
        raise ResourceError(f"panel {p}x{horizon} exceeds {cap} entries")
    if p >= 1 << 32 or horizon >= 1 << 32:
        raise ResourceError("panel index exceeds 32 bits")
    counters = panel_counters(np.arange(p), np.arange(horizon))
    entries = sampler.draw(seed, counters)
    return EpsilonPanel(p, T, lag, seed, entries, sampler.dist)


# --------------------------------------------------------------------------
# Moments
# --------------------------------------------------------------------------

def _abs_normal_moment(r: float) -> float:
    return 2 ** (r / 2) * math.gamma((r + 1) / 2) / math.sqrt(math.pi)


def entry_moment(dist: EntryDistribution, order: int) -> float:
    """E|eps|**order under the standardized (possibly truncated) law."""
    if order < 1:
        raise DomainError(f"moment order must be >= 1, got {order}")
    fam = dist.family
    if dist.truncate_at is None:
        if fam is Family.GAUSSIAN:
            return _abs_normal_moment(order)
        if fam is Family.RADEMACHER:
            return 1.0
        if fam is Family.UNIFORM:
            return math.sqrt(3.0) ** order / (order + 1)
        nu = dist.nu
        if order >= nu:
            raise DomainError(f"E|t_{nu:g}|^{order} diverges (order must be < nu)")
        raw = math.exp(
            0.5 * order * math.log(nu)
            + special.gammaln((order + 1) / 2) + special.gammaln((nu - order) / 2)
            - 0.5 * math.log(math.pi) - special.gammaln(nu / 2)
        )
        return raw * _t_scale(nu) ** order

    sampler = make_sampler(dist)
    c, mu, sd = dist.truncate_at, sampler.trunc_mean, sampler.trunc_std
    if fam is Family.RADEMACHER:
        # c >= 1 here, otherwise make_sampler raised.
        return abs(1.0 - mu) ** order / sd**order
    dens = _base_density(dist)
    lim = min(c, math.sqrt(3.0)) if fam is Family.UNIFORM else c
    inside, _ = integrate(lambda x: np.abs(x - mu) ** order * dens(x), -lim, lim,
                          abs_tol=_TRUNC_QUAD_TOL, rel_tol=_TRUNC_QUAD_TOL)
    outside_mass = 1.0 - integrate(dens, -lim, lim, abs_tol=_TRUNC_QUAD_TOL,
                                   rel_tol=_TRUNC_QUAD_TOL)[0]
    return (inside + max(outside_mass, 0.0) * abs(mu) ** order) / sd**order
