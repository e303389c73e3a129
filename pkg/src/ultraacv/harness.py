"""Run orchestration: replicated single runs and regime sweeps.

Replication r of a run with base seed b uses panel seed ``mix64(b, r)``, so
each replication can be computed anywhere, in any order, and the gathered
results are identical whatever the worker count.
"""
from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from .acv import spectrum_pipeline
from .ensemble import EntryDistribution, make_sampler, mix64, sample_panel
from .errors import ConfigurationError, NonConvergenceError, NumericalDegeneracyError
from .laws import LimitLaw
from .spectral_stats import Spectrum, SpectrumMeta, empirical_moment, extremes, ks_distance

log = logging.getLogger(__name__)

REGIME_WARN_RATIO = 0.2
WORKERS_ENV = "ACV_MAX_WORKERS"


@dataclass(frozen=True)
class RunConfig:
    p: int
    T: int
    distribution: EntryDistribution
    lag: int = 1
    base_seed: int = 0
    replications: int = 1
    moment_orders: tuple[int, ...] = (1, 2, 3, 4, 5, 6)

    def __post_init__(self):
        object.__setattr__(self, "moment_orders", tuple(int(k) for k in self.moment_orders))
        if self.p < 2:
            raise ConfigurationError(f"p must be >= 2, got {self.p}")
        if self.T < 1:
            raise ConfigurationError(f"T must be >= 1, got {self.T}")
        if self.lag < 1:
            raise ConfigurationError(f"lag must be >= 1, got {self.lag}")
        if self.replications < 1:
            raise ConfigurationError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigurationError("base_seed must be an unsigned 64-bit integer")
        if any(k < 1 for k in self.moment_orders):
            raise ConfigurationError(f"moment orders must be >= 1: {self.moment_orders}")

    @property
    def ratio(self) -> float:
        return self.p / self.T

    def check_regime(self) -> None:
        if self.T < self.p or self.ratio > REGIME_WARN_RATIO:
            log.warning("p/T = %.3g is far from the ultra-dimensional regime", self.ratio)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "T": self.T,
            "lag": self.lag,
            "distribution": self.distribution.to_dict(),
            "base_seed": self.base_seed,
            "replications": self.replications,
            "moment_orders": list(self.moment_orders),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunConfig":
        d = dict(d)
        d["distribution"] = EntryDistribution.from_dict(d["distribution"])
        if "moment_orders" in d:
            d["moment_orders"] = tuple(d["moment_orders"])
        return cls(**d)

    @property
    def run_id(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass
class ReplicationRecord:
    rep: int
    seed: int
    lambda_max: float | None
    lambda_min_pos: float | None
    ks_squared: float | None
    ks_quarter: float | None
    moments: list[float] | None
    wall_ms: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class RunRecord:
    run_id: str
    config: RunConfig
    replications: list[ReplicationRecord]
    wall_ms: float | None = None
    spectra: list[Spectrum] | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "config": self.config.to_dict(),
            "replications": [asdict(r) for r in self.replications],
            "wall_ms": self.wall_ms,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunRecord":
        return cls(
            run_id=d["run_id"],
            config=RunConfig.from_dict(d["config"]),
            replications=[ReplicationRecord(**r) for r in d["replications"]],
            wall_ms=d.get("wall_ms"),
        )

    def ok_replications(self) -> list[ReplicationRecord]:
        return [r for r in self.replications if r.ok]


def replication_seed(base_seed: int, rep: int) -> int:
    return mix64(base_seed, rep)


def _replicate(task: tuple[dict, int, bool, bool]):
    """Worker body: one replication, returned with its spectrum values if asked."""
    cfg_dict, rep, timing, keep = task
    cfg = RunConfig.from_dict(cfg_dict)
    seed = replication_seed(cfg.base_seed, rep)
    t0 = time.perf_counter()
    try:
        panel = sample_panel(make_sampler(cfg.distribution), cfg.p, cfg.T, cfg.lag, seed)
        spec = spectrum_pipeline(panel)
    except (NonConvergenceError, NumericalDegeneracyError) as exc:
        rec = ReplicationRecord(rep, seed, None, None, None, None, None,
                                error=f"{type(exc).__name__}: {exc}")
        return rec, None
    lam_max, lam_min = extremes(spec)
    rec = ReplicationRecord(
        rep=rep,
        seed=seed,
        lambda_max=lam_max,
        lambda_min_pos=lam_min,
        ks_squared=ks_distance(spec, LimitLaw.SQUARED),
        ks_quarter=ks_distance(spec.sqrt(), LimitLaw.QUARTER),
        moments=[empirical_moment(spec, k) for k in cfg.moment_orders],
    )
    if timing:
        rec.wall_ms = (time.perf_counter() - t0) * 1e3
    return rec, (spec.values if keep else None)


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                workers = int(env)
            except ValueError as exc:
                raise ConfigurationError(f"{WORKERS_ENV}={env!r} is not an integer") from exc
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ConfigurationError(f"worker count must be >= 1, got {workers}")
    return workers


def _execute(tasks: list, workers: int) -> list:
    # executor.map yields in submission order, so gathering is order-stable.
    if workers == 1 or len(tasks) <= 1:
        return [_replicate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_replicate, tasks))


def _assemble(cfg: RunConfig, results, keep_spectra: bool, wall_ms) -> RunRecord:
    reps = [r for r, _ in results]
    spectra = None
    if keep_spectra:
        spectra = [
            Spectrum(v, SpectrumMeta(cfg.p, cfg.T, cfg.lag, cfg.distribution.tag, r.seed))
            for r, v in results if v is not None
        ]
    return RunRecord(cfg.run_id, cfg, reps, wall_ms, spectra)


def run_single(
    cfg: RunConfig,
    workers: int | None = None,
    timing: bool = False,
    keep_spectra: bool = False,
) -> RunRecord:
    """All replications of one configuration.

    With ``timing=False`` (the default) wall-clock fields are left as None so
    that records, and anything exported from them, are reproducible byte for
    byte.
    """
    cfg.check_regime()
    t0 = time.perf_counter()
    tasks = [(cfg.to_dict(), r, timing, keep_spectra) for r in range(cfg.replications)]
    results = _execute(tasks, resolve_workers(workers))
    wall = (time.perf_counter() - t0) * 1e3 if timing else None
    return _assemble(cfg, results, keep_spectra, wall)


# --------------------------------------------------------------------------
# Sweeps
# --------------------------------------------------------------------------

class SweepMode(str, enum.Enum):
    ULTRA = "ultra"
    RATIO = "ratio"


@dataclass(frozen=True)
class SweepConfig:
    """Sequence of (p, T) points.

    ULTRA: p = round(scale * T**alpha) with 0 < alpha < 1, so p/T -> 0.
    RATIO: p = round(c * T).
    ``template`` supplies everything except p and T.
    """

    mode: SweepMode
    T_list: tuple[int, ...]
    template: RunConfig
    alpha: float | None = None
    scale: float = 1.0
    c: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", SweepMode(self.mode))
        object.__setattr__(self, "T_list", tuple(int(t) for t in self.T_list))
        if not self.T_list:
            raise ConfigurationError("T_list is empty")
        if any(b <= a for a, b in zip(self.T_list, self.T_list[1:])):
            raise ConfigurationError(f"T_list must be strictly increasing: {self.T_list}")
        if self.mode is SweepMode.ULTRA:
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ConfigurationError(f"ULTRA mode needs 0 < alpha < 1, got {self.alpha}")
            if not self.scale > 0:
                raise ConfigurationError(f"scale must be > 0, got {self.scale}")
        else:
            if self.c is None or not self.c > 0:
                raise ConfigurationError(f"RATIO mode needs c > 0, got {self.c}")
        for p, T in self.points():
            if p < 2:
                raise ConfigurationError(f"sweep point T={T} gives p={p} < 2")

    def points(self) -> list[tuple[int, int]]:
        out = []
        for T in self.T_list:
            if self.mode is SweepMode.ULTRA:
                p = round(self.scale * T**self.alpha)
            else:
                p = round(self.c * T)
            out.append((int(p), T))
        return out

    def configs(self) -> list[RunConfig]:
        t = self.template
        return [RunConfig(p=p, T=T, distribution=t.distribution, lag=t.lag,
                          base_seed=t.base_seed, replications=t.replications,
                          moment_orders=t.moment_orders)
                for p, T in self.points()]

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SweepConfig":
        d = dict(d)
        known = {"mode", "T_list", "alpha", "scale", "c", "lag", "distribution",
                 "base_seed", "replications", "moment_orders"}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown sweep config keys: {sorted(unknown)}")
        try:
            mode = SweepMode(str(d["mode"]).lower())
            T_list = d["T_list"]
        except (KeyError, ValueError) as exc:
            raise ConfigurationError("sweep config needs a valid mode and T_list") from exc
        dist = EntryDistribution.from_dict(d.get("distribution", {"family": "gaussian"}))
        first_T = int(T_list[0]) if T_list else 1
        template = RunConfig(
            p=2, T=first_T, distribution=dist,
            lag=int(d.get("lag", 1)),
            base_seed=int(d.get("base_seed", 0)),
            replications=int(d.get("replications", 1)),
            moment_orders=tuple(d.get("moment_orders", (1, 2, 3, 4, 5, 6))),
        )
        return cls(mode, tuple(T_list), template, d.get("alpha"),
                   float(d.get("scale", 1.0)), d.get("c"))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"mode": self.mode.value, "T_list": list(self.T_list)}
        if self.mode is SweepMode.ULTRA:
            d["alpha"] = self.alpha
            d["scale"] = self.scale
        else:
            d["c"] = self.c
        t = self.template
        d.update(lag=t.lag, distribution=t.distribution.to_dict(), base_seed=t.base_seed,
                 replications=t.replications, moment_orders=list(t.moment_orders))
        return d


@dataclass
class PointSummary:
    p: int
    T: int
    ratio: float
    n_ok: int
    n_failed: int
    median_lambda_max: float | None
    median_edge_gap: float | None
    mean_ks_squared: float | None
    mean_ks_quarter: float | None
    mean_m1: float | None


@dataclass
class SweepSummary:
    config: SweepConfig
    records: list[RunRecord]
    points: list[PointSummary]
    ks_decreasing_steps: int
    ks_strictly_decreasing: bool
    edge_gap_decreasing: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "points": [asdict(p) for p in self.points],
            "ks_decreasing_steps": self.ks_decreasing_steps,
            "ks_strictly_decreasing": self.ks_strictly_decreasing,
            "edge_gap_decreasing": self.edge_gap_decreasing,
        }


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return statistics.fmean(xs) if xs else None


def _median(xs):
    xs = [x for x in xs if x is not None]
    return statistics.median(xs) if xs else None


def summarize_point(rec: RunRecord) -> PointSummary:
    ok = rec.ok_replications()
    lam = [r.lambda_max for r in ok]
    m1 = None
    if 1 in rec.config.moment_orders:
        i = rec.config.moment_orders.index(1)
        m1 = _mean([r.moments[i] for r in ok])
    med = _median(lam)
    return PointSummary(
        p=rec.config.p,
        T=rec.config.T,
        ratio=rec.config.ratio,
        n_ok=len(ok),
        n_failed=len(rec.replications) - len(ok),
        median_lambda_max=med,
        median_edge_gap=_median([abs(x - 4.0) for x in lam]),
        mean_ks_squared=_mean([r.ks_squared for r in ok]),
        mean_ks_quarter=_mean([r.ks_quarter for r in ok]),
        mean_m1=m1,
    )


def _decreasing(values: Sequence[float | None]) -> tuple[int, bool]:
    steps = sum(1 for a, b in zip(values, values[1:])
                if a is not None and b is not None and b < a)
    return steps, steps == len(values) - 1


def run_sweep(
    sweep: SweepConfig,
    workers: int | None = None,
    timing: bool = False,
) -> SweepSummary:
    """Run every point of the sweep through one shared worker pool."""
    cfgs = sweep.configs()
    for cfg in cfgs:
        if sweep.mode is SweepMode.ULTRA:
            cfg.check_regime()
    tasks, owners = [], []
    for i, cfg in enumerate(cfgs):
        d = cfg.to_dict()
        for r in range(cfg.replications):
            tasks.append((d, r, timing, False))
            owners.append(i)
    results = _execute(tasks, resolve_workers(workers))
    grouped: list[list] = [[] for _ in cfgs]
    for i, res in zip(owners, results):
        grouped[i].append(res)
    records = [_assemble(cfg, grouped[i], False, None) for i, cfg in enumerate(cfgs)]
    points = [summarize_point(r) for r in records]
    steps, strict = _decreasing([p.mean_ks_squared for p in points])
    gap_steps, _ = _decreasing([p.median_edge_gap for p in points])
    return SweepSummary(
        config=sweep,
        records=records,
        points=points,
        ks_decreasing_steps=steps,
        ks_strictly_decreasing=strict,
        edge_gap_decreasing=(len(points) > 1 and gap_steps == len(points) - 1),
    )
