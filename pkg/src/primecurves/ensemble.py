"""Seeded Monte Carlo ensembles over the four model kinds."""

from __future__ import annotations

import dataclasses
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .geometry import NormalizationMethod, NormalizedSample, normalize
from .rng import MASK64, derive_seed
from .scaling import MAX_M, BoxCountProfile, CountMode, ScalingFit, fit_scaling, profile
from .spectral import (
    DEFAULT_MAX_ATTEMPTS,
    CramerExhaustedError,
    CurveSample,
    ModelKind,
    SpectralModel,
    build_model,
    evaluate,
)

ALL_KINDS = tuple(ModelKind)


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending setting."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class RealizationError(RuntimeError):
    def __init__(self, kind: ModelKind, index: int, seed: int | None, cause: Exception):
        self.kind, self.index, self.seed = kind, index, seed
        super().__init__(f"realization failed (kind={kind.value}, index={index}, seed={seed}): {cause}")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    samples: int = 1 << 13
    realizations: int = 200
    base_seed: int = 0
    kinds: tuple[ModelKind, ...] = ALL_KINDS
    normalization: NormalizationMethod = NormalizationMethod.CENTROID_DIAMETER
    m_min: int = 1
    m_max: int = 10
    fit_lo: int = 3
    fit_hi: int = 7
    mode: CountMode = CountMode.POINTS
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        def setf(name, value):
            object.__setattr__(self, name, value)

        for name in ("n", "samples", "realizations", "base_seed", "m_min", "m_max", "fit_lo", "fit_hi", "max_attempts"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(name, f"expected an integer, got {value!r}")
            setf(name, int(value))
        try:
            kinds = (self.kinds,) if isinstance(self.kinds, (str, ModelKind)) else tuple(self.kinds)
            setf("kinds", tuple(dict.fromkeys(ModelKind.parse(k) for k in kinds)))
        except (TypeError, ValueError) as exc:
            raise ConfigError("kinds", str(exc)) from None
        for name, parser in (("normalization", NormalizationMethod.parse), ("mode", CountMode.parse)):
            try:
                setf(name, parser(getattr(self, name)))
            except ValueError as exc:
                raise ConfigError(name, str(exc)) from None

        if self.n < 2:
            raise ConfigError("n", f"must be >= 2, got {self.n}")
        if ModelKind.CRAMER in self.kinds and self.n < 5:
            raise ConfigError("n", f"the cramer model needs n >= 5, got {self.n}")
        if self.samples < 2:
            raise ConfigError("samples", f"must be >= 2, got {self.samples}")
        if self.realizations < 1:
            raise ConfigError("realizations", f"must be >= 1, got {self.realizations}")
        if not 0 <= self.base_seed <= MASK64:
            raise ConfigError("base_seed", "must be a 64-bit unsigned integer")
        if not self.kinds:
            raise ConfigError("kinds", "at least one model kind is required")
        if not 1 <= self.m_min <= self.m_max <= MAX_M:
            raise ConfigError("m_max", f"scale range must satisfy 1 <= m_min <= m_max <= {MAX_M}")
        if not (self.m_min <= self.fit_lo < self.fit_hi <= self.m_max):
            raise ConfigError(
                "fit_hi",
                f"fit window [{self.fit_lo}, {self.fit_hi}] must lie inside "
                f"[{self.m_min}, {self.m_max}] and span at least two scales",
            )
        if self.max_attempts < 1:
            raise ConfigError("max_attempts", "must be >= 1")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["kinds"] = [k.value for k in self.kinds]
        d["normalization"] = self.normalization.value
        d["mode"] = self.mode.value
        return d


@dataclass(frozen=True, eq=False)
class RealizationResult:
    kind: ModelKind
    index: int
    seed: int | None
    model: SpectralModel
    profile: BoxCountProfile
    fit: ScalingFit

    @property
    def slope(self) -> float:
        return self.fit.slope


@dataclass(frozen=True)
class KindStats:
    kind: ModelKind
    realizations: int
    mean: float
    std: float
    minimum: float
    maximum: float
    m_values: tuple[int, ...] = ()
    mean_exponents: tuple[float, ...] = ()

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.realizations)


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    config: ExperimentConfig
    stats: Mapping[ModelKind, KindStats]
    results: Mapping[ModelKind, tuple[RealizationResult, ...]] = field(repr=False, default_factory=dict)

    @property
    def kinds(self) -> tuple[ModelKind, ...]:
        return tuple(self.stats)

    def slopes(self, kind: ModelKind | str) -> np.ndarray:
        return np.array([r.slope for r in self.results[ModelKind.parse(kind)]])


@dataclass(frozen=True)
class ModelComparison:
    ranking: tuple[ModelKind, ...]
    means: Mapping[ModelKind, float]
    dispersion: Mapping[ModelKind, float]
    differences: Mapping[tuple[ModelKind, ModelKind], float]
    ties: tuple[tuple[ModelKind, ModelKind], ...] = ()


def realization_seed(config: ExperimentConfig, kind: ModelKind, index: int) -> int | None:
    if kind is ModelKind.PRIME:
        return None
    return derive_seed(config.base_seed, kind.value, index)


def realize_curve(config: ExperimentConfig, kind: ModelKind | str, index: int, samples: int | None = None) -> CurveSample:
    """Build and sample the model for one realization (no normalization)."""
    kind = ModelKind.parse(kind)
    seed = realization_seed(config, kind, index)
    try:
        model = build_model(kind, config.n, seed, config.max_attempts)
    except CramerExhaustedError as exc:
        raise RealizationError(kind, index, seed, exc) from exc
    return evaluate(model, config.samples if samples is None else samples)


def analyze(points, config: ExperimentConfig, normalization=None) -> tuple[NormalizedSample, BoxCountProfile, ScalingFit]:
    norm = normalize(points, config.normalization if normalization is None else normalization)
    prof = profile(norm, config.m_min, config.m_max, config.mode)
    return norm, prof, fit_scaling(prof, config.fit_lo, config.fit_hi)


def run_realization(config: ExperimentConfig, kind: ModelKind | str, index: int) -> RealizationResult:
    kind = ModelKind.parse(kind)
    if not 0 <= index < config.realizations:
        raise ValueError(f"realization index {index} outside [0, {config.realizations})")
    curve = realize_curve(config, kind, index)
    _, prof, fit = analyze(curve.points, config)
    return RealizationResult(kind, index, curve.model.seed, curve.model, prof, fit)


def _shifted_mean(a: np.ndarray) -> np.ndarray:
    # about the first row, so identical rows give their value back exactly
    return a[0] + (a - a[0]).mean(axis=0)


def _summarize(kind: ModelKind, results: tuple[RealizationResult, ...]) -> KindStats:
    slopes = np.array([r.slope for r in results])
    exps = np.array([r.profile.exponents for r in results])
    dev = slopes - slopes[0]
    return KindStats(
        kind=kind,
        realizations=len(results),
        mean=float(_shifted_mean(slopes)),
        std=float(dev.std(ddof=1)) if slopes.size > 1 else 0.0,
        minimum=float(slopes.min()),
        maximum=float(slopes.max()),
        m_values=tuple(int(m) for m in results[0].profile.m_values),
        mean_exponents=tuple(float(e) for e in _shifted_mean(exps)),
    )


def summarize(config: ExperimentConfig, results: Mapping[ModelKind, Iterable[RealizationResult]]) -> EnsembleSummary:
    """Aggregate realizations (in index order) into per-kind statistics."""
    ordered = {k: tuple(sorted(rs, key=lambda r: r.index)) for k, rs in results.items()}
    stats = {k: _summarize(k, rs) for k, rs in ordered.items()}
    return EnsembleSummary(config, stats, ordered)


def run_ensemble(
    config: ExperimentConfig,
    workers: int = 1,
    progress: Callable[[ModelKind, int], None] | None = None,
) -> EnsembleSummary:
    """Run every realization of every configured kind and summarize.

    Realizations depend only on ``(config, kind, index)``, so ``workers > 1``
    gives the same results as a sequential run. Any failed realization aborts
    the ensemble with a ``RealizationError`` naming kind, index and seed.
    """
    results: dict[ModelKind, list[RealizationResult]] = {}
    jobs = [(k, i) for k in config.kinds if k.randomized for i in range(config.realizations)]

    def one(job):
        res = run_realization(config, *job)
        if progress is not None:
            progress(*job)
        return res

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(one, jobs))
    else:
        done = [one(j) for j in jobs]
    for kind, group in itertools.groupby(done, key=lambda r: r.kind):
        results[kind] = list(group)

    if ModelKind.PRIME in config.kinds:
        # deterministic: one evaluation, replicated across indices
        first = run_realization(config, ModelKind.PRIME, 0)
        results[ModelKind.PRIME] = [dataclasses.replace(first, index=i) for i in range(config.realizations)]
    return summarize(config, {k: results[k] for k in config.kinds})


def compare_models(summary: EnsembleSummary | Mapping[ModelKind, KindStats]) -> ModelComparison:
    """Rank kinds by mean fitted slope, highest first; equal means sort by kind name."""
    stats = summary.stats if isinstance(summary, EnsembleSummary) else summary
    stats = {ModelKind.parse(k): v for k, v in stats.items()}
    if len(stats) < 2:
        raise ValueError("model comparison needs at least two kinds")
    ranking = tuple(sorted(stats, key=lambda k: (-stats[k].mean, k.value)))
    means = {k: stats[k].mean for k in ranking}
    differences = {
        (a, b): means[a] - means[b] for i, a in enumerate(ranking) for b in ranking[i + 1 :]
    }
    ties = tuple(pair for pair, diff in differences.items() if diff == 0.0)
    return ModelComparison(
        ranking=ranking,
        means=means,
        dispersion={k: stats[k].std for k in ranking},
        differences=differences,
        ties=ties,
    )
