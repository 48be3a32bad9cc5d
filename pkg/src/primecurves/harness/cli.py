"""``primecurves`` command line: curve, boxcount, ensemble, robustness.

Exit status is 0 on success. Failures print one JSON object to stderr,
``{"error": <category>, "message": ..., "field": ...}``, and exit with the
category's code: 2 usage, 3 config, 4 io, 5 computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .. import robustness as rb
from ..ensemble import (
    ConfigError,
    ExperimentConfig,
    RealizationError,
    compare_models,
    realize_curve,
    run_ensemble,
)
from ..geometry import DegenerateSampleError, normalize
from ..scaling import fit_scaling, profile
from ..spectral import CramerExhaustedError, ModelKind
from . import io
from .config import RobustnessSettings, build_config, load_config

EXIT_CODES = {"usage": 2, "config": 3, "io": 4, "computation": 5}
SELF_TESTS = ("line", "filled", "point")


class CLIError(Exception):
    def __init__(self, category: str, message: str, field: str | None = None):
        self.category, self.field = category, field
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message)


def _kinds(text: str) -> list[str]:
    return [k for k in (s.strip() for s in text.split(",")) if k]


def _add_experiment_flags(p: argparse.ArgumentParser, with_kinds: bool = True) -> None:
    p.add_argument("--n", type=int, help="series cutoff: primes p <= n")
    p.add_argument("--samples", type=int, help="grid nodes N (default 8192)")
    p.add_argument("--seed", type=int, dest="base_seed", help="base seed (64-bit unsigned)")
    p.add_argument("--normalization", help="centroid-diameter | max-radius | bounding-box")
    p.add_argument("--max-attempts", type=int, dest="max_attempts", help="Cramér redraw cap")
    if with_kinds:
        p.add_argument("--kinds", type=_kinds, help="comma-separated model kinds")
        p.add_argument("--realizations", type=int, help="ensemble size R")


def _add_scale_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m-min", type=int, dest="m_min", help="smallest scale index (default 1)")
    p.add_argument("--m-max", type=int, dest="m_max", help="largest scale index (default 10)")
    p.add_argument("--fit-lo", type=int, dest="fit_lo", help="fit window start (default 3)")
    p.add_argument("--fit-hi", type=int, dest="fit_hi", help="fit window end (default 7)")
    p.add_argument("--mode", help="points | segments")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="primecurves", description=__doc__.splitlines()[0])
    parser.add_argument("--workers", type=int, default=1, help="threads for ensemble runs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve", help="sample one model and write its normalized curve")
    _add_experiment_flags(p, with_kinds=False)
    p.add_argument("--model", default="prime", help="model kind (default prime)")
    p.add_argument("--index", type=int, default=0, help="realization index for seeded models")
    p.add_argument("--raw", action="store_true", help="write unnormalized points")
    p.add_argument("--config", type=Path, help="TOML experiment config; flags override it")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")

    p = sub.add_parser("boxcount", help="box counts and scaling fit for one curve")
    _add_experiment_flags(p, with_kinds=False)
    _add_scale_flags(p)
    p.add_argument("--model", default="prime")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--self-test", choices=SELF_TESTS, dest="self_test", help="synthetic input instead of a model")
    p.add_argument("--config", type=Path, help="TOML experiment config; flags override it")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")

    p = sub.add_parser("ensemble", help="run a seeded Monte Carlo ensemble")
    _add_experiment_flags(p)
    _add_scale_flags(p)
    p.add_argument("--config", type=Path, required=True, help="TOML experiment config; flags override it")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")

    p = sub.add_parser("robustness", help="sensitivity checks against fit window, normalization, R and N")
    _add_experiment_flags(p)
    _add_scale_flags(p)
    p.add_argument("--axes", type=_kinds, default=[a.value for a in rb.Axis], help="comma-separated axes")
    p.add_argument("--self-test", choices=("power-law",), dest="self_test", help="synthetic exact power law")
    p.add_argument("--config", type=Path, help="TOML experiment config; flags override it")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")
    return parser


_FIELDS = ("n", "samples", "realizations", "base_seed", "kinds", "normalization", "mode",
           "max_attempts", "m_min", "m_max", "fit_lo", "fit_hi")


def resolve(args: argparse.Namespace, **fixed: Any) -> tuple[ExperimentConfig, RobustnessSettings]:
    """Config file values, overridden by any flags given on the command line."""
    fields: dict[str, Any] = {}
    settings = RobustnessSettings()
    if getattr(args, "config", None) is not None:
        fields, settings = load_config(args.config)
    for name in _FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    fields.update(fixed)
    return build_config(fields), settings


def _prepare_out(out: Path) -> Path:
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError("io", f"cannot create output directory {out}: {exc.strerror or exc}", "out") from None
    return out


def _curve_points(config: ExperimentConfig, kind: ModelKind, index: int):
    if index < 0:
        raise CLIError("usage", f"--index must be >= 0, got {index}", "index")
    return realize_curve(config, kind, index)


def cmd_curve(args) -> list[Path]:
    kind = ModelKind.parse(args.model)
    config, _ = resolve(args, kinds=[kind.value])
    out = _prepare_out(args.out)
    curve = _curve_points(config, kind, args.index)
    norm = normalize(curve.points, config.normalization)
    pts = curve.points if args.raw else norm.points
    j = np.arange(1, len(pts) + 1)
    path = io.write_csv(out / "curve.csv", ("j", "t", "x", "y"),
                        zip(j, curve.grid.nodes, pts[:, 0], pts[:, 1]))
    info = {
        "command": "curve",
        "config": config.to_dict(),
        "base_seed": config.base_seed,
        "model": {"kind": kind.value, "index": args.index, "seed": curve.model.seed, "terms": len(curve.model)},
        "raw": bool(args.raw),
        "normalization": {
            "method": norm.method.value,
            "raw_centroid": list(norm.centroid_before),
            "scale_factor": norm.scale_factor,
        },
    }
    return [path, io.write_manifest(out, [path], info)]


def self_test_points(name: str, count: int = 1 << 13) -> np.ndarray:
    """Synthetic inputs already inside the unit box."""
    if name == "line":
        return np.column_stack((np.linspace(0.0, 1.0, count), np.zeros(count)))
    if name == "filled":
        g = np.arange(128) / 127.0
        xx, yy = np.meshgrid(g, g, indexing="ij")
        return np.column_stack((xx.ravel(), yy.ravel()))
    if name == "point":
        return np.full((count, 2), 0.5)
    raise CLIError("usage", f"unknown self-test {name!r}", "self-test")


def cmd_boxcount(args) -> list[Path]:
    out = _prepare_out(args.out)
    if args.self_test:
        fields = {k: getattr(args, k) for k in ("m_min", "m_max", "fit_lo", "fit_hi", "mode") if getattr(args, k) is not None}
        config = build_config({"n": 2, "kinds": ["prime"], **fields})
        points = self_test_points(args.self_test)
        source: dict[str, Any] = {"self_test": args.self_test, "points": len(points), "normalization": None}
    else:
        kind = ModelKind.parse(args.model)
        config, _ = resolve(args, kinds=[kind.value])
        curve = _curve_points(config, kind, args.index)
        norm = normalize(curve.points, config.normalization)
        points = norm
        source = {
            "model": {"kind": kind.value, "index": args.index, "seed": curve.model.seed},
            "normalization": config.normalization.value,
            "raw_centroid": list(norm.centroid_before),
            "scale_factor": norm.scale_factor,
        }
    prof = profile(points, config.m_min, config.m_max, config.mode)
    fit = fit_scaling(prof, config.fit_lo, config.fit_hi)
    csv_path = io.write_csv(
        out / "boxcount.csv",
        ("m", "epsilon", "count", "exponent"),
        zip(prof.m_values, prof.epsilons, prof.counts, prof.exponents),
    )
    fit_path = io.write_json(
        out / "fit.json",
        {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "residual_rms": fit.residual_rms,
            "window": [fit.m_lo, fit.m_hi],
            "mode": prof.mode.value,
            "source": source,
        },
    )
    info = {"command": "boxcount", "config": config.to_dict(), "base_seed": config.base_seed}
    files = [csv_path, fit_path]
    return files + [io.write_manifest(out, files, info)]


def _comparison_payload(summary) -> dict:
    if len(summary.kinds) < 2:
        return {"ranking": [k.value for k in summary.kinds], "note": "single kind: nothing to compare"}
    cmp = compare_models(summary)
    return {
        "ranking": [k.value for k in cmp.ranking],
        "means": cmp.means,
        "dispersion": cmp.dispersion,
        "differences": [{"higher": a.value, "lower": b.value, "difference": d} for (a, b), d in cmp.differences.items()],
        "ties": [[a.value, b.value] for a, b in cmp.ties],
    }


def write_ensemble(summary, out: Path) -> list[Path]:
    rows = [
        (r.kind, r.index, r.seed, r.fit.slope, r.fit.intercept, r.fit.residual_rms)
        for rs in summary.results.values()
        for r in rs
    ]
    files = [io.write_csv(out / "realizations.csv", ("kind", "index", "seed", "slope", "intercept", "residual"), rows)]
    files.append(
        io.write_csv(
            out / "summary.csv",
            ("kind", "realizations", "mean", "std", "stderr", "min", "max"),
            ((s.kind, s.realizations, s.mean, s.std, s.stderr, s.minimum, s.maximum) for s in summary.stats.values()),
        )
    )
    files.append(
        io.write_csv(
            out / "exponents.csv",
            ("kind", "m", "epsilon", "mean_exponent"),
            (
                (s.kind, m, 2.0**-m, e)
                for s in summary.stats.values()
                for m, e in zip(s.m_values, s.mean_exponents)
            ),
        )
    )
    files.append(io.write_json(out / "comparison.json", _comparison_payload(summary)))
    return files


def cmd_ensemble(args) -> list[Path]:
    config, _ = resolve(args)
    out = _prepare_out(args.out)
    summary = run_ensemble(config, workers=args.workers)
    files = write_ensemble(summary, out)
    info = {"command": "ensemble", "config": config.to_dict(), "base_seed": config.base_seed}
    return files + [io.write_manifest(out, files, info)]


def power_law_profiles(exponent: float = 1.5, m_min: int = 1, m_max: int = 10):
    ms = np.arange(m_min, m_max + 1)
    return {"synthetic": [rb.BoxCountProfile.from_counts(ms, 2.0 ** (exponent * ms))]}


def write_reports(reports, out: Path) -> list[Path]:
    files = [io.write_json(out / f"robustness_{axis.value}.json", rep.to_dict()) for axis, rep in reports.items()]
    rows = rb.threshold_table(reports)
    files.append(
        io.write_csv(
            out / "thresholds.csv",
            ("axis", "check", "value", "threshold", "passed"),
            ((r["axis"], r["check"], r["value"], r["threshold"], r["passed"]) for r in rows),
        )
    )
    return files


def cmd_robustness(args) -> list[Path]:
    try:
        axes = [rb.Axis.parse(a) for a in args.axes]
    except ValueError as exc:
        raise CLIError("usage", str(exc), "axes") from None
    out = _prepare_out(args.out)
    if args.self_test:
        if axes != [rb.Axis.FIT_RANGE]:
            raise CLIError("usage", "--self-test power-law supports only --axes fit-range", "axes")
        reports = {rb.Axis.FIT_RANGE: rb.fit_range_report(power_law_profiles())}
        info: dict[str, Any] = {"command": "robustness", "self_test": "power-law", "axes": ["fit-range"]}
    else:
        config, settings = resolve(args)
        reports = rb.run_robustness(
            config,
            axes,
            windows=settings.windows,
            sizes=settings.sizes,
            densities=settings.densities,
            workers=args.workers,
        )
        info = {
            "command": "robustness",
            "config": config.to_dict(),
            "base_seed": config.base_seed,
            "axes": [a.value for a in axes],
            "robustness": settings.to_dict(),
        }
    files = write_reports(reports, out)
    return files + [io.write_manifest(out, files, info)]


COMMANDS = {"curve": cmd_curve, "boxcount": cmd_boxcount, "ensemble": cmd_ensemble, "robustness": cmd_robustness}


def _fail(category: str, message: str, field: str | None = None) -> int:
    payload = {"error": category, "message": message}
    if field:
        payload["field"] = field
    print(json.dumps(payload), file=sys.stderr)
    return EXIT_CODES[category]


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        files = COMMANDS[args.command](args)
    except CLIError as exc:
        return _fail(exc.category, str(exc), exc.field)
    except ConfigError as exc:
        return _fail("config", str(exc), exc.field)
    except (RealizationError, CramerExhaustedError, DegenerateSampleError) as exc:
        return _fail("computation", str(exc))
    except OSError as exc:
        return _fail("io", f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc))
    except ValueError as exc:
        return _fail("usage", str(exc))
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
