"""Command-line interface over the fitting/validation/search pipeline.

Every command is deterministic: stochastic commands require an explicit
--seed (there is no implicit random seed), outputs are written with LF
endings and shortest-round-trip float formatting so repeated identical
invocations produce byte-identical files, and each toolkit error class
maps to a stable nonzero exit code (see EXIT_CODES / README).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import errors
from .data import SensorConfiguration, load_dataset, split
from .errors import MissingSeed, TactiplanError, ZeroGroundTruth
from .layout import load_layout
from .noise import noise_sweep
from .predictor import (
    Metric,
    PredictorAnchors,
    TunedPredictor,
    TuningSettings,
    fit_pipeline,
    load_predictor,
    predict,
    rank_sites,
    save_predictor,
    tuning_log_rows,
)
from .search import best_k_subset, exhaustive_search, pareto_frontier
from .synthetic import generate_dataset, load_hidden_model

EXIT_CODES: dict[type, int] = {
    errors.ParseError: 10,
    errors.InvariantError: 11,
    errors.DimensionMismatch: 12,
    errors.RangeError: 13,
    errors.TooFewRecords: 14,
    errors.AllUndefined: 15,
    errors.UndefinedWeights: 16,
    errors.DegenerateAnchors: 17,
    errors.EmptyValidation: 18,
    errors.EmptyDataset: 19,
    errors.DivergenceError: 20,
    errors.KOutOfRange: 21,
    errors.LayoutTooLarge: 22,
    errors.NoFeasibleConfig: 23,
    errors.EmptyLevels: 24,
    errors.ZeroGroundTruth: 25,
    errors.MissingSeed: 26,
}
IO_EXIT_CODE = 27


@dataclass(frozen=True)
class ValidationRow:
    config_id: str
    ground_truth: float
    predicted: float
    relative_error_percent: float


@dataclass(frozen=True)
class ValidationReport:
    """Per-record relative errors (percent of ground truth) and their mean."""

    rows: tuple[ValidationRow, ...]
    mean_error_percent: float


def validation_report(predictor: TunedPredictor, dataset) -> ValidationReport:
    """Relative error |predicted - truth| / truth * 100 for every record."""
    rows = []
    for rec in dataset.records:
        if rec.success_rate == 0.0:
            raise ZeroGroundTruth(
                f"record {rec.config_id!r}: relative error undefined for ground truth 0"
            )
        predicted = predict(predictor, rec.config)
        err = abs(predicted - rec.success_rate) / rec.success_rate * 100.0
        rows.append(ValidationRow(rec.config_id, rec.success_rate, predicted, err))
    mean = sum(r.relative_error_percent for r in rows) / len(rows)
    return ValidationReport(rows=tuple(rows), mean_error_percent=mean)


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text, encoding="utf-8")


def _tabulate(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[c]) for r in cells) for c in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _require_seed(args) -> int:
    if args.seed is None:
        raise MissingSeed(f"command {args.command!r} is stochastic; pass an explicit --seed")
    return args.seed


def _config_from_bits(text: str, n_sites: int) -> SensorConfiguration:
    config = SensorConfiguration.from_bitstring(text)
    if len(config) != n_sites:
        raise errors.DimensionMismatch(
            f"--bits has {len(config)} bits, predictor expects {n_sites}"
        )
    return config


def _cmd_fit(args) -> int:
    layout = load_layout(args.layout)
    train = load_dataset(args.data, layout)
    anchors = PredictorAnchors(args.anchors[0], args.anchors[1])
    settings = TuningSettings(
        step_delta=args.step_delta,
        max_passes=args.max_passes,
        validation_metric=Metric(args.metric),
    )
    validation = None
    if args.validation is not None:
        validation = load_dataset(args.validation, layout)
    elif args.val_fraction is not None:
        seed = _require_seed(args)
        train, validation = split(train, args.val_fraction, seed)
    tuned, _, _ = fit_pipeline(train, anchors, validation=validation, settings=settings, ridge=args.ridge)

    predictor_json = json.dumps(tuned.to_json_dict(), indent=2, sort_keys=True) + "\n"
    _emit(predictor_json, args.out)
    if args.tuning_log is not None:
        _emit(
            _csv_text(["pass", "site_id", "delta", "val_before", "val_after"], tuning_log_rows(tuned)),
            args.tuning_log,
        )
    log = tuned.tuning_log
    final_err = log[-1].val_after if log else None
    if final_err is None:
        print(f"fine-tuning accepted no updates ({settings.validation_metric.value} already minimal)")
    else:
        print(
            f"fine-tuning accepted {len(log)} updates; final {settings.validation_metric.value} = {final_err!r}"
        )
    return 0


def _cmd_predict(args) -> int:
    predictor = load_predictor(args.predictor)
    if args.bits is not None:
        config = _config_from_bits(args.bits, predictor.n_sites)
        value = predict(predictor, config)
        _emit(f"{value!r}\n", args.out)
        return 0
    layout = load_layout(args.layout)
    dataset = load_dataset(args.data, layout)
    rows = [[rec.config_id, predict(predictor, rec.config)] for rec in dataset.records]
    _emit(_csv_text(["config_id", "predicted"], rows), args.out)
    return 0


def _cmd_validate(args) -> int:
    predictor = load_predictor(args.predictor)
    layout = load_layout(args.layout)
    dataset = load_dataset(args.data, layout)
    report = validation_report(predictor, dataset)
    header = ["config_id", "ground_truth", "predicted", "relative_error_percent"]
    rows = [
        [r.config_id, r.ground_truth, r.predicted, r.relative_error_percent]
        for r in report.rows
    ]
    if args.format == "json":
        payload = {
            "rows": [
                {
                    "config_id": r.config_id,
                    "ground_truth": r.ground_truth,
                    "predicted": r.predicted,
                    "relative_error_percent": r.relative_error_percent,
                }
                for r in report.rows
            ],
            "mean_error_percent": report.mean_error_percent,
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(_csv_text(header, rows), args.out)
    if args.out is not None:  # pretty table goes to stdout either way
        sys.stdout.write(_tabulate(header, rows))
    print(f"mean relative error: {report.mean_error_percent!r} %")
    return 0


def _cmd_rank(args) -> int:
    predictor = load_predictor(args.predictor)
    layout = load_layout(args.layout)
    ranked = rank_sites(predictor, layout)
    header = ["rank", "site_id", "name", "finger", "region", "weight"]
    rows = [
        [pos + 1, site.id, site.name, site.finger.value, site.region.value, weight]
        for pos, (site, weight) in enumerate(ranked)
    ]
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(_csv_text(header, rows), args.out)
    if args.out is not None:
        sys.stdout.write(_tabulate(header, rows))
    return 0


def _search_payload(result) -> list:
    return [result.config.bitstring(), result.predicted, result.cost]


def _cmd_search(args) -> int:
    predictor = load_predictor(args.predictor)
    layout = load_layout(args.layout)
    if (args.budget is None) == (args.k is None):
        raise errors.InvariantError("pass exactly one of --budget or --k")
    if args.k is not None:
        result = best_k_subset(predictor, layout, args.k)
    else:
        result = exhaustive_search(predictor, layout, args.budget, workers=args.workers)
    header = ["bits", "predicted", "cost"]
    if args.format == "json":
        payload = dict(zip(header, _search_payload(result)))
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(_csv_text(header, [_search_payload(result)]), args.out)
    return 0


def _cmd_pareto(args) -> int:
    predictor = load_predictor(args.predictor)
    layout = load_layout(args.layout)
    frontier = pareto_frontier(predictor, layout, workers=args.workers)
    header = ["cost", "predicted", "bits"]
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in frontier.csv_rows()]
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(_csv_text(header, frontier.csv_rows()), args.out)
    return 0


def _cmd_noise_sweep(args) -> int:
    predictor = load_predictor(args.predictor)
    seed = _require_seed(args)
    config = _config_from_bits(args.bits, predictor.n_sites)
    result = noise_sweep(
        predictor,
        config,
        trials=args.trials,
        seed=seed,
        levels=args.levels,
        workers=args.workers,
    )
    header = ["flip_probability", "analytic", "mc_mean", "mc_ci"]
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in result.csv_rows()]
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit(_csv_text(header, result.csv_rows()), args.out)
    return 0


def _cmd_generate(args) -> int:
    layout = load_layout(args.layout)
    hidden = load_hidden_model(args.hidden)
    seed = _require_seed(args)
    dataset = generate_dataset(hidden, layout, args.records, seed, task=args.task)
    header = ["config_id", "task", "success_rate"] + [f"s{i}" for i in range(layout.n_sites)]
    rows = [
        [rec.config_id, rec.task, rec.success_rate, *rec.config.bits]
        for rec in dataset.records
    ]
    _emit(_csv_text(header, rows), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tactiplan",
        description="Predict manipulation success from tactile sensor layouts; rank, search, and stress them.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--layout", help="layout JSON path")
    common.add_argument("--seed", type=int, default=None, help="PRNG seed (required for stochastic commands)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit the correlation-seeded predictor on an ablation dataset")
    p.add_argument("--data", required=True, help="training dataset CSV")
    p.add_argument("--anchors", nargs=2, type=float, required=True, metavar=("P0", "PFULL"),
                   help="measured success with no sensors / with the full set")
    p.add_argument("--validation", default=None, help="separate validation dataset CSV")
    p.add_argument("--val-fraction", type=float, default=None,
                   help="hold out this fraction of --data for validation (needs --seed)")
    p.add_argument("--step-delta", type=float, default=0.01)
    p.add_argument("--max-passes", type=int, default=50)
    p.add_argument("--metric", choices=("mae", "rmse"), default="mae")
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--tuning-log", default=None, help="write accepted updates to this CSV")
    p.set_defaults(func=_cmd_fit, needs_layout=True)

    p = sub.add_parser("predict", parents=[common], help="predict success for a configuration or dataset")
    p.add_argument("--predictor", required=True, help="predictor JSON path")
    p.add_argument("--bits", default=None, help="configuration bitstring in site order, e.g. 0101...")
    p.add_argument("--data", default=None, help="dataset CSV to predict row by row (needs --layout)")
    p.set_defaults(func=_cmd_predict, needs_layout=False)

    p = sub.add_parser("validate", parents=[common], help="compare predictions against measured success rates")
    p.add_argument("--predictor", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=_cmd_validate, needs_layout=True)

    p = sub.add_parser("rank", parents=[common], help="rank sites by fine-tuned importance")
    p.add_argument("--predictor", required=True)
    p.set_defaults(func=_cmd_rank, needs_layout=True)

    p = sub.add_parser("search", parents=[common], help="best configuration under a cost budget or size k")
    p.add_argument("--predictor", required=True)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_search, needs_layout=True)

    p = sub.add_parser("pareto", parents=[common], help="performance/cost frontier over all configurations")
    p.add_argument("--predictor", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_pareto, needs_layout=True)

    p = sub.add_parser("noise-sweep", parents=[common], help="expected success under bit-flip noise levels")
    p.add_argument("--predictor", required=True)
    p.add_argument("--bits", required=True, help="configuration bitstring to stress")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--levels", nargs="+", type=float, default=None,
                   help="flip probabilities (default: 0 0.01 0.03 0.05 0.1 0.2 0.3 0.4)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_noise_sweep, needs_layout=False)

    p = sub.add_parser("generate", parents=[common], help="sample a synthetic ablation dataset from a hidden model")
    p.add_argument("--hidden", required=True, help="hidden model JSON path")
    p.add_argument("--records", type=int, default=200)
    p.add_argument("--task", default="synthetic")
    p.set_defaults(func=_cmd_generate, needs_layout=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_layout", False) and args.layout is None:
        parser.error(f"{args.command}: --layout is required")
    if args.command == "predict" and (args.bits is None) == (args.data is None):
        parser.error("predict: pass exactly one of --bits or --data")
    if args.command == "predict" and args.data is not None and args.layout is None:
        parser.error("predict: --data needs --layout")
    try:
        return args.func(args)
    except TactiplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES.get(type(exc), 1)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return IO_EXIT_CODE


if __name__ == "__main__":
    sys.exit(main())
