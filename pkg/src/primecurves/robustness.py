"""Sensitivity of fitted slopes to fit window, normalization, ensemble size
and sampling density.

Each check produces a ``SensitivityReport``: the per-kind mean slope under
every configuration on one axis, the largest spread between configurations,
and whether the ranking of kinds stays the same. Threshold comparisons are
reported, never raised.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Mapping, Sequence

import numpy as np

from .ensemble import (
    EnsembleSummary,
    ExperimentConfig,
    analyze,
    realization_seed,
    realize_curve,
    run_ensemble,
    summarize,
)
from .geometry import NormalizationMethod
from .scaling import BoxCountProfile, fit_scaling
from .spectral import ModelKind, build_model, evaluate

DEFAULT_WINDOWS = ((2, 8), (3, 7), (4, 8))
DEFAULT_SIZES = (200, 500)
DEFAULT_DENSITIES = (1 << 11, 1 << 12, 1 << 13, 1 << 14)
FIT_RANGE_THRESHOLD = 0.03
NORMALIZATION_THRESHOLD = 0.02
DENSITY_THRESHOLD = 0.02
# ensemble-size check: mean shift allowed, in units of the smaller ensemble's standard error
MEAN_SHIFT_STDERRS = 3.0


class Axis(str, enum.Enum):
    FIT_RANGE = "fit-range"
    NORMALIZATION = "normalization"
    ENSEMBLE_SIZE = "ensemble-size"
    DENSITY = "density"

    @classmethod
    def parse(cls, value: "str | Axis") -> "Axis":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown robustness axis {value!r} (expected one of: {names})") from None


@dataclass(frozen=True)
class SensitivityReport:
    axis: Axis
    configurations: tuple[str, ...]
    slopes: Mapping[str, Mapping[str, float]]  # configuration -> kind -> mean slope
    deviations: Mapping[str, float]  # kind -> spread across configurations
    orderings: Mapping[str, tuple[str, ...]]
    threshold: float | None
    details: Mapping[str, object] = field(default_factory=dict)
    extra_checks: Mapping[str, bool] = field(default_factory=dict)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values(), default=0.0)

    @property
    def ordering_invariant(self) -> bool:
        return len(set(self.orderings.values())) <= 1

    @property
    def within_threshold(self) -> bool | None:
        if self.threshold is None:
            return None
        return self.max_deviation < self.threshold

    @property
    def passed(self) -> bool:
        ok = self.ordering_invariant and all(self.extra_checks.values())
        return ok and self.within_threshold is not False

    def to_dict(self) -> dict:
        return {
            "axis": self.axis.value,
            "configurations": list(self.configurations),
            "slopes": {c: dict(v) for c, v in self.slopes.items()},
            "deviations": dict(self.deviations),
            "max_deviation": self.max_deviation,
            "orderings": {c: list(v) for c, v in self.orderings.items()},
            "ordering_invariant": self.ordering_invariant,
            "threshold": self.threshold,
            "within_threshold": self.within_threshold,
            "extra_checks": dict(self.extra_checks),
            "passed": self.passed,
            "details": _plain(self.details),
        }


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _key(kind) -> str:
    return kind.value if isinstance(kind, ModelKind) else str(kind)


def rank(means: Mapping[str, float]) -> tuple[str, ...]:
    return tuple(sorted(means, key=lambda k: (-means[k], k)))


def spread(values: Sequence[float]) -> float:
    return float(max(values) - min(values)) if values else 0.0


def drift(values: Sequence[float]) -> float:
    """Largest change between consecutive configurations."""
    return float(max((abs(b - a) for a, b in zip(values, values[1:])), default=0.0))


def _report(axis, table, threshold, deviation=spread, details=None, extra_checks=None) -> SensitivityReport:
    configs = tuple(table)
    kinds = tuple(table[configs[0]]) if configs else ()
    return SensitivityReport(
        axis=axis,
        configurations=configs,
        slopes=table,
        deviations={k: deviation([table[c][k] for c in configs]) for k in kinds},
        orderings={c: rank(table[c]) for c in configs},
        threshold=threshold,
        details=details or {},
        extra_checks=extra_checks or {},
    )


def window_label(lo: int, hi: int) -> str:
    return f"m={lo}..{hi}"


def fit_range_report(
    profiles: Mapping[object, Sequence[BoxCountProfile]],
    windows: Sequence[tuple[int, int]] = DEFAULT_WINDOWS,
    threshold: float | None = FIT_RANGE_THRESHOLD,
) -> SensitivityReport:
    """Refit already computed profiles over each window; no re-simulation."""
    table = {}
    for lo, hi in windows:
        table[window_label(lo, hi)] = {
            _key(kind): float(np.mean([fit_scaling(p, lo, hi).slope for p in profs]))
            for kind, profs in profiles.items()
        }
    return _report(Axis.FIT_RANGE, table, threshold)


def fit_range_sensitivity(
    config: ExperimentConfig,
    ensemble: EnsembleSummary | None = None,
    windows: Sequence[tuple[int, int]] = DEFAULT_WINDOWS,
    threshold: float | None = FIT_RANGE_THRESHOLD,
    workers: int = 1,
) -> SensitivityReport:
    for lo, hi in windows:
        if not config.m_min <= lo < hi <= config.m_max:
            raise ValueError(
                f"scale range [{config.m_min}, {config.m_max}] does not cover fit window [{lo}, {hi}]"
            )
    if ensemble is None:
        ensemble = run_ensemble(config, workers=workers)
    profiles = {k: [r.profile for r in rs] for k, rs in ensemble.results.items()}
    return fit_range_report(profiles, windows, threshold)


def normalization_report(
    curves: Mapping[object, Sequence[np.ndarray]],
    config: ExperimentConfig,
    methods: Sequence[NormalizationMethod | str] = tuple(NormalizationMethod),
    threshold: float | None = NORMALIZATION_THRESHOLD,
) -> SensitivityReport:
    """Profile and fit the same raw point sets under each normalization."""
    methods = [NormalizationMethod.parse(m) for m in methods]
    slopes = {m.value: {} for m in methods}
    for kind, samples in curves.items():
        per = {m.value: [] for m in methods}
        for pts in samples:
            for m in methods:
                per[m.value].append(analyze(pts, config, m)[2].slope)
        for m in methods:
            slopes[m.value][_key(kind)] = float(np.mean(per[m.value]))
    return _report(Axis.NORMALIZATION, slopes, threshold)


def _curves(config: ExperimentConfig, samples: int | None = None) -> dict[ModelKind, list[np.ndarray]]:
    out = {}
    for kind in config.kinds:
        count = 1 if kind is ModelKind.PRIME else config.realizations
        out[kind] = [realize_curve(config, kind, i, samples).points for i in range(count)]
    return out


def normalization_sensitivity(
    config: ExperimentConfig,
    methods: Sequence[NormalizationMethod | str] = tuple(NormalizationMethod),
    threshold: float | None = NORMALIZATION_THRESHOLD,
) -> SensitivityReport:
    return normalization_report(_curves(config), config, methods, threshold)


def ensemble_size_sensitivity(
    config: ExperimentConfig,
    sizes: Sequence[int] = DEFAULT_SIZES,
    ensemble: EnsembleSummary | None = None,
    workers: int = 1,
) -> SensitivityReport:
    """Compare nested ensembles: the size-``r`` run is the first ``r`` realizations of the largest.

    If ``ensemble`` (an independently computed smaller run) is given, its
    slopes are checked against the matching prefix of the large run.
    """
    sizes = sorted(int(s) for s in sizes)
    if len(sizes) < 2 or sizes[0] < 1:
        raise ValueError(f"need at least two positive ensemble sizes, got {sizes}")
    large = run_ensemble(config.replace(realizations=sizes[-1]), workers=workers)
    table, stderr, variance = {}, {}, {}
    for r in sizes:
        sub = summarize(config.replace(realizations=r), {k: rs[:r] for k, rs in large.results.items()})
        label = f"R={r}"
        table[label] = {k.value: s.mean for k, s in sub.stats.items()}
        stderr[label] = {k.value: s.stderr for k, s in sub.stats.items()}
        variance[label] = {k.value: s.std**2 for k, s in sub.stats.items()}

    small, big = f"R={sizes[0]}", f"R={sizes[-1]}"
    checks = {}
    for kind in config.kinds:
        k = kind.value
        shift = abs(table[big][k] - table[small][k])
        if kind.randomized:
            checks[f"{k}: stderr reduced"] = stderr[big][k] < stderr[small][k]
            checks[f"{k}: mean unchanged"] = shift <= MEAN_SHIFT_STDERRS * stderr[small][k]
        else:
            checks[f"{k}: mean unchanged"] = shift == 0.0
    details = {"stderr": stderr, "variance": variance}
    if ensemble is not None:
        nested = all(
            np.array_equal(ensemble.slopes(k), large.slopes(k)[: ensemble.config.realizations])
            for k in ensemble.kinds
        )
        checks["nested seeds"] = bool(nested)
    return _report(Axis.ENSEMBLE_SIZE, table, None, details=details, extra_checks=checks)


def _check_densities(densities: Sequence[int]) -> list[int]:
    densities = [int(d) for d in densities]
    if any(d < 2 for d in densities):
        raise ValueError(f"densities must be >= 2, got {densities}")
    if any(b <= a for a, b in zip(densities, densities[1:])):
        raise ValueError(f"densities must be strictly increasing, got {densities}")
    return densities


def density_report(
    samplers: Mapping[object, Sequence[Callable[[int], np.ndarray]]],
    config: ExperimentConfig,
    densities: Sequence[int] = DEFAULT_DENSITIES,
    threshold: float | None = DENSITY_THRESHOLD,
) -> SensitivityReport:
    """Mean slope per label at each density; ``samplers`` map a point count to raw points."""
    densities = _check_densities(densities)
    table = {}
    for d in densities:
        table[f"N={d}"] = {
            _key(kind): float(np.mean([analyze(sample(d), config)[2].slope for sample in fns]))
            for kind, fns in samplers.items()
        }
    return _report(Axis.DENSITY, table, threshold, deviation=drift)


def density_sensitivity(
    config: ExperimentConfig,
    densities: Sequence[int] = DEFAULT_DENSITIES,
    threshold: float | None = DENSITY_THRESHOLD,
) -> SensitivityReport:
    """Re-sample the same models at each density; deviation is the largest consecutive drift."""
    densities = _check_densities(densities)
    samplers = {}
    for kind in config.kinds:
        count = 1 if kind is ModelKind.PRIME else config.realizations
        models = [
            build_model(kind, config.n, realization_seed(config, kind, i), config.max_attempts)
            for i in range(count)
        ]
        samplers[kind] = [partial(_sample_points, m) for m in models]
    return density_report(samplers, config, densities, threshold)


def _sample_points(model, count: int) -> np.ndarray:
    return evaluate(model, count).points


def run_robustness(
    config: ExperimentConfig,
    axes: Sequence[Axis | str] = tuple(Axis),
    ensemble: EnsembleSummary | None = None,
    windows: Sequence[tuple[int, int]] = DEFAULT_WINDOWS,
    sizes: Sequence[int] = DEFAULT_SIZES,
    densities: Sequence[int] = DEFAULT_DENSITIES,
    workers: int = 1,
) -> dict[Axis, SensitivityReport]:
    axes = [Axis.parse(a) for a in axes]
    if ensemble is None and (Axis.FIT_RANGE in axes or Axis.ENSEMBLE_SIZE in axes):
        ensemble = run_ensemble(config, workers=workers)
    reports = {}
    for axis in axes:
        if axis is Axis.FIT_RANGE:
            reports[axis] = fit_range_sensitivity(config, ensemble, windows)
        elif axis is Axis.NORMALIZATION:
            reports[axis] = normalization_sensitivity(config)
        elif axis is Axis.ENSEMBLE_SIZE:
            reports[axis] = ensemble_size_sensitivity(config, sizes, ensemble, workers)
        else:
            reports[axis] = density_sensitivity(config, densities)
    return reports


def threshold_table(reports: Mapping[Axis, SensitivityReport]) -> list[dict]:
    """One row per check: axis, statistic, value, threshold, pass/fail."""
    rows = []
    for axis, rep in reports.items():
        stat = "max drift" if axis is Axis.DENSITY else "max |delta slope|"
        rows.append(
            {
                "axis": axis.value,
                "check": stat,
                "value": rep.max_deviation,
                "threshold": rep.threshold,
                "passed": rep.within_threshold,
            }
        )
        rows.append(
            {"axis": axis.value, "check": "ordering invariant", "value": None, "threshold": None, "passed": rep.ordering_invariant}
        )
        for name, ok in rep.extra_checks.items():
            rows.append({"axis": axis.value, "check": name, "value": None, "threshold": None, "passed": ok})
    return rows
