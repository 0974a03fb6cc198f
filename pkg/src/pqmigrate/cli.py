"""Operator command line: generate, validate, train, evaluate, predict, serve.

Every run with the same flags and seeds writes byte-identical artifacts.
Exit codes: 0 success, 1 input/usage error, 2 internal error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .advisor import load_model, recommend, save_model, train_model
from .cart import TreeParams, extract_rules, predict_matrix
from .datagen import GeneratorConfig, generate_dataset, validate_consistency
from .domain import CSV_COLUMNS, Dataset, SystemRecord
from .errors import InputError, PqmigrateError
from .evaluation import (
    classification_report,
    confusion_matrix,
    cross_validate,
    method_strategy_heatmap,
    system_vulnerability_scores,
)
from .features import encode_dataset, stratified_split
from .forest import ForestParams, predict_proba_matrix


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems on stderr and exits 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pqmigrate", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pqmigrate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a labeled synthetic dataset")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--jsonl", help="also write JSON-lines to this path")
    p.add_argument("--report", help="write the consistency validation report (JSON)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--per-class", type=int, default=241)
    p.add_argument("--noise", type=float, default=0.006)

    p = sub.add_parser("validate", help="check dataset labels against the rule table")
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="write the validation report (JSON)")

    p = sub.add_parser("train", help="fit the forest and the interpretable tree")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="model document output path (JSON)")
    p.add_argument("--rules", help="write readable tree rules to this path")
    p.add_argument("--importances", help="write feature importances (JSON)")
    p.add_argument("--seed", type=int, default=7, help="split and forest seed")
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--dt-depth", type=int, default=5)
    p.add_argument("--rf-trees", type=int, default=100)
    p.add_argument("--cv-k", type=int, default=5)
    p.add_argument("--no-cv", action="store_true", help="skip cross-validation")

    p = sub.add_parser("evaluate", help="score a trained model on its holdout")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--cv-k", type=int, default=0, help="re-run CV with this k (0 = use stored)")

    p = sub.add_parser("predict", help="recommend a strategy for one system")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="record", help="JSON file with the system description")
    for column in CSV_COLUMNS[:-1]:
        flag = "--" + column.replace("_", "-")
        p.add_argument(flag, dest=column)
    p.add_argument("--out", help="write the recommendation JSON here as well")

    p = sub.add_parser("report", help="dataset analysis tables (heatmap CSVs)")
    p.add_argument("--data", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--model", required=True)
    p.add_argument("--data", help="dataset for /dataset/summary")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--ui", help="directory of built UI assets to host at /")
    return parser


def _dump_json(payload: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _load_dataset(path: str) -> Dataset:
    if not os.path.exists(path):
        raise InputError(f"dataset file not found: {path}")
    if path.endswith(".jsonl"):
        return Dataset.from_jsonl(path)
    return Dataset.from_csv(path)


def _cmd_generate(args) -> int:
    config = GeneratorConfig(
        records_per_class=args.per_class,
        label_noise_rate=args.noise,
        seed=args.seed,
    )
    dataset = generate_dataset(config)
    dataset.to_csv(args.out)
    if args.jsonl:
        dataset.to_jsonl(args.jsonl)
    report = validate_consistency(dataset)
    if args.report:
        _dump_json(report.to_dict(), args.report)
    print(
        f"wrote {len(dataset)} records to {args.out} "
        f"(consistency {report.consistency_ratio:.4f})"
    )
    return 0


def _cmd_validate(args) -> int:
    dataset = _load_dataset(args.data)
    report = validate_consistency(dataset)
    if args.out:
        _dump_json(report.to_dict(), args.out)
    print(
        f"{report.consistent}/{report.total} consistent "
        f"(ratio {report.consistency_ratio:.4f}, {len(report.violations)} violations)"
    )
    return 0


def _model_params_from_args(args) -> tuple[TreeParams, ForestParams]:
    tree_params = TreeParams(max_depth=args.dt_depth)
    forest_params = ForestParams(n_trees=args.rf_trees, seed=args.seed)
    return tree_params, forest_params


def _cmd_train(args) -> int:
    dataset = _load_dataset(args.data)
    tree_params, forest_params = _model_params_from_args(args)
    cv_summary = None
    if not args.no_cv:
        dt_cv = cross_validate(dataset, tree_params, args.cv_k, args.seed)
        rf_cv = cross_validate(dataset, forest_params, args.cv_k, args.seed)
        cv_summary = {"k": args.cv_k, "tree": dt_cv.to_dict(), "forest": rf_cv.to_dict()}
    model, train, test = train_model(
        dataset,
        tree_params=tree_params,
        forest_params=forest_params,
        test_fraction=args.test_fraction,
        seed=args.seed,
        cv_summary=cv_summary,
    )
    save_model(model, args.out)
    if args.rules:
        with open(args.rules, "w", encoding="utf-8") as handle:
            for line in extract_rules(model.interpretable_tree, model.schema):
                handle.write(line + "\n")
    if args.importances:
        _dump_json(model.forest.importances, args.importances)

    mtest = encode_dataset(test, model.schema)
    rf_acc = float(
        (predict_proba_matrix(model.forest, mtest.values).argmax(1) == mtest.labels).mean()
    )
    dt_acc = float(
        (predict_matrix(model.interpretable_tree, mtest.values).argmax(1) == mtest.labels).mean()
    )
    print(f"trained on {len(train)} records; holdout accuracy forest {rf_acc:.3f}, tree {dt_acc:.3f}")
    return 0


def _cmd_evaluate(args) -> int:
    dataset = _load_dataset(args.data)
    model = load_model(args.model)
    meta = model.metadata
    split_seed = meta.get("split_seed")
    test_fraction = meta.get("test_fraction")
    if split_seed is None or test_fraction is None:
        raise InputError("model metadata lacks split settings; cannot reproduce its holdout")
    train, test = stratified_split(dataset, float(test_fraction), int(split_seed))
    mtest = encode_dataset(test, model.schema)
    rf_pred = predict_proba_matrix(model.forest, mtest.values).argmax(1)
    dt_pred = predict_matrix(model.interpretable_tree, mtest.values).argmax(1)
    truths = mtest.labels

    rf_report = classification_report(rf_pred, truths)
    dt_report = classification_report(dt_pred, truths)
    rf_confusion = confusion_matrix(rf_pred, truths)
    dt_confusion = confusion_matrix(dt_pred, truths)

    cv_summary = meta.get("cv")
    if args.cv_k:
        tree_params = TreeParams(max_depth=int(meta["tree_params"]["max_depth"]))
        forest_params = ForestParams(
            n_trees=int(meta["forest_params"]["n_trees"]),
            seed=int(meta["forest_params"]["seed"]),
        )
        dt_cv = cross_validate(dataset, tree_params, args.cv_k, int(split_seed))
        rf_cv = cross_validate(dataset, forest_params, args.cv_k, int(split_seed))
        cv_summary = {"k": args.cv_k, "tree": dt_cv.to_dict(), "forest": rf_cv.to_dict()}

    methods = method_strategy_heatmap(dataset)
    vulnerability = system_vulnerability_scores(dataset)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(
        {
            "forest": {"report": rf_report.to_dict(), "confusion": rf_confusion.to_dict()},
            "tree": {"report": dt_report.to_dict(), "confusion": dt_confusion.to_dict()},
            "cv": cv_summary,
            "importances": model.forest.importances,
            "method_strategy_heatmap": methods.to_dict(),
            "system_vulnerability_scores": vulnerability.to_dict(),
        },
        out / "evaluation.json",
    )
    with open(out / "report.txt", "w", encoding="utf-8") as handle:
        handle.write("=== Random forest ===\n")
        handle.write(rf_report.to_text() + "\n\n")
        handle.write(rf_confusion.to_text() + "\n\n")
        handle.write("=== Interpretable tree ===\n")
        handle.write(dt_report.to_text() + "\n\n")
        handle.write(dt_confusion.to_text() + "\n")
    with open(out / "method_strategy.csv", "w", encoding="utf-8") as handle:
        handle.write(methods.to_csv())
    with open(out / "system_vulnerability.csv", "w", encoding="utf-8") as handle:
        handle.write(vulnerability.to_csv())
    print(
        f"forest accuracy {rf_report.accuracy:.3f}, tree accuracy {dt_report.accuracy:.3f}; "
        f"artifacts in {out}"
    )
    return 0


def _record_from_args(args) -> SystemRecord:
    if args.record:
        if not os.path.exists(args.record):
            raise InputError(f"record file not found: {args.record}")
        with open(args.record, "r", encoding="utf-8") as handle:
            return SystemRecord.from_dict(json.load(handle))
    data = {}
    for column in CSV_COLUMNS[:-1]:
        value = getattr(args, column, None)
        if value is None:
            raise InputError(f"missing record field {column!r} (use --in or field flags)", field=column)
        data[column] = int(value) if column not in ("system_type", "crypto_method") else value
    return SystemRecord.from_dict(data)


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    record = _record_from_args(args)
    result = recommend(model, record).to_dict()
    text = json.dumps(result, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    return 0


def _cmd_report(args) -> int:
    dataset = _load_dataset(args.data)
    methods = method_strategy_heatmap(dataset)
    vulnerability = system_vulnerability_scores(dataset)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "method_strategy.csv", "w", encoding="utf-8") as handle:
        handle.write(methods.to_csv())
    with open(out / "system_vulnerability.csv", "w", encoding="utf-8") as handle:
        handle.write(vulnerability.to_csv())
    _dump_json(
        {
            "class_counts": dataset.class_counts(),
            "method_strategy_heatmap": methods.to_dict(),
            "system_vulnerability_scores": vulnerability.to_dict(),
        },
        out / "summary.json",
    )
    print(f"wrote analysis tables to {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    model = load_model(args.model)
    dataset = _load_dataset(args.data) if args.data else None
    ui_dir = args.ui
    if ui_dir and not os.path.isdir(ui_dir):
        raise InputError(f"UI directory not found: {ui_dir}")
    host = args.host or os.environ.get("PQMIGRATE_HOST", "127.0.0.1")
    port = args.port if args.port is not None else int(os.environ.get("PQMIGRATE_PORT", "8080"))
    app = create_app(model, dataset=dataset, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "validate": _cmd_validate,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except PqmigrateError as exc:
        print(f"pqmigrate {args.command}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"pqmigrate {args.command}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything else is a bug, not bad input
        print(f"pqmigrate {args.command}: internal error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
