"""Operator command line: probe, extract, train, tune, evaluate, classify,
replay, serve.

Exit codes: 0 success, 2 usage error, 3 input error (missing or invalid
files, malformed domains), 4 runtime failure. Machine-readable results go to
files or stdout as JSON; progress and summaries go to stderr-free stdout one
line at a time. All randomness is governed by --seed (default 0).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import ingest, pipeline
from .enrich import fingerprint_cms
from .evaluate import evaluate_cv, export_curves
from .features import FEATURE_SETS, encoded_mask, extract, fit_encoder, vector_to_dict
from .forest import (
    DEFAULT_SEARCH_SPACE,
    HyperParams,
    fit_forest,
    random_search,
)
from .probe import probe_domain, record_to_dict
from .store import Archive, dataset_load, model_load, model_save, model_version
from .transport import LiveTransport

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_RUNTIME = 4


def _load_config(args) -> pipeline.Config:
    if not getattr(args, "config", None):
        raise ValueError("this command needs --config")
    return pipeline.load_config(args.config)


def _transport(args):
    if getattr(args, "config", None):
        return pipeline.load_config(args.config).make_transport()
    return LiveTransport()


def _print_json(payload, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
        print(f"wrote {out}")
    else:
        print(text)


# --- subcommand handlers -------------------------------------------------------


def _cmd_probe(args) -> int:
    domain = pipeline.normalize_domain(args.domain)
    record = probe_domain(domain, _transport(args))
    _print_json(record_to_dict(record), args.out)
    return EXIT_OK


def _cmd_extract(args) -> int:
    archive = Archive(args.archive)
    if not archive.path.exists():
        raise FileNotFoundError(f"archive not found: {args.archive}")
    asn_table = geo_table = None
    if args.config:
        asn_table, geo_table = pipeline.load_config(args.config).load_tables()
    lines = []
    for _, entry in archive.scan():
        record = entry.record
        cms = fingerprint_cms(record.http.body or "", record.http.headers)
        vector = extract(record, cms, asn_table, geo_table, record.probed_at)
        lines.append(json.dumps(
            {"domain": entry.domain, "probed_at": record.probed_at.isoformat(),
             "features": vector_to_dict(vector)},
            sort_keys=True,
        ))
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text)
        print(f"extracted {len(lines)} records -> {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _params_from_args(args) -> HyperParams:
    if getattr(args, "params", None):
        data = json.loads(Path(args.params).read_text())
        data.pop("accuracy", None)
        return HyperParams(**data)
    return HyperParams(
        n_trees=args.trees,
        max_depth=args.depth,
        min_samples_split=args.min_split,
        min_leaf=args.min_leaf,
        features_per_split=args.features_per_split,
    )


def _load_matrix(dataset_path: str):
    examples = dataset_load(dataset_path)
    if not examples:
        raise ValueError(f"dataset is empty: {dataset_path}")
    vectors = [e.features for e in examples]
    labels = [e.label for e in examples]
    encoder = fit_encoder(vectors)
    return encoder, encoder.transform_many(vectors), labels


def _cmd_train(args) -> int:
    encoder, matrix, labels = _load_matrix(args.dataset)
    params = _params_from_args(args)
    mask = None
    if args.feature_set != "all":
        mask = encoded_mask(encoder, args.feature_set)
        matrix = matrix[:, sorted(mask)]
    forest = fit_forest(matrix, labels, params, seed=args.seed)
    forest.encoder = encoder
    forest.feature_mask = mask
    model_save(forest, args.out)
    print(
        f"trained {params.n_trees} trees on {matrix.shape[0]} examples "
        f"({matrix.shape[1]} columns, feature set {args.feature_set}); "
        f"model {model_version(forest)} -> {args.out}"
    )
    return EXIT_OK


def _cmd_tune(args) -> int:
    _, matrix, labels = _load_matrix(args.dataset)
    space = dict(DEFAULT_SEARCH_SPACE)
    if args.max_trees:
        capped = [n for n in space["n_trees"] if n <= args.max_trees]
        space["n_trees"] = capped or [args.max_trees]
    params, accuracy = random_search(
        matrix, labels, space=space, iters=args.iters, folds=args.k, seed=args.seed
    )
    chosen = dataclasses.asdict(params)
    print(f"best of {args.iters} settings (mean {args.k}-fold accuracy {accuracy:.4f}):")
    for key, value in chosen.items():
        print(f"  {key} = {value}")
    if args.out:
        Path(args.out).write_text(
            json.dumps({**chosen, "accuracy": accuracy}, indent=2, sort_keys=True) + "\n"
        )
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    encoder, matrix, labels = _load_matrix(args.dataset)
    if args.feature_set != "all":
        matrix = matrix[:, sorted(encoded_mask(encoder, args.feature_set))]
    params = _params_from_args(args)
    report = evaluate_cv(matrix, labels, params, k=args.k, seed=args.seed)
    for cname in report.class_order:
        print(
            f"{cname:16s} roc_auc {report.roc_auc_mean[cname]:.4f} "
            f"(±{report.roc_auc_std[cname]:.4f})  pr_auc {report.pr_auc_mean[cname]:.4f} "
            f"(±{report.pr_auc_std[cname]:.4f})"
        )
    print(f"accuracy {report.accuracy:.4f} over {report.folds} folds")
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out}")
    if args.curves:
        written = export_curves(report, args.curves)
        print(f"wrote {len(written)} curve files -> {args.curves}")
    return EXIT_OK


def _cmd_classify(args) -> int:
    if bool(args.domain) == bool(args.input):
        raise ValueError("classify needs exactly one of --domain or --input")
    config = _load_config(args)
    forest = model_load(config.model)
    archive = Archive(config.archive)
    asn_table, geo_table = config.load_tables()
    transport = config.make_transport()
    domains = [args.domain] if args.domain else [
        line.strip() for line in Path(args.input).read_text().splitlines() if line.strip()
    ]
    for raw in domains:
        prediction, _, reprobed = pipeline.classify_domain(
            raw,
            transport=transport,
            forest=forest,
            archive=archive,
            asn_table=asn_table,
            geo_table=geo_table,
            freshness=config.freshness_window(),
        )
        print(json.dumps({**prediction.to_dict(), "reprobed": reprobed}, sort_keys=True))
    archive.close()
    return EXIT_OK


def _cmd_replay(args) -> int:
    config = _load_config(args)
    forest = model_load(config.model)
    archive = Archive(config.archive)
    queue = pipeline.ModerationQueue(config.queue)
    asn_table, geo_table = config.load_tables()

    admitter = ingest.Admitter(window=config.dedup_window())
    for _, entry in archive.scan():  # domains archived earlier stay deduped
        admitter.seen(entry.domain, entry.probed_at)
    stats = ingest.FeedStats()
    candidates = list(ingest.candidate_stream(config.feeds(), admitter, stats=stats))

    summary = pipeline.run_pipeline(
        candidates,
        transport=config.make_transport(),
        forest=forest,
        archive=archive,
        queue=queue,
        asn_table=asn_table,
        geo_table=geo_table,
        workers=config.workers,
    )
    archive.close()
    payload = {
        "feed_events": stats.events,
        "malformed_skipped": stats.skipped,
        "prefilter_rejected": stats.prefilter_rejected,
        **summary.to_dict(),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve

    serve(_load_config(args))
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def _add_seed(sub):
    sub.add_argument("--seed", type=int, default=0, help="root seed for all randomness")


def _add_config(sub, required=False):
    sub.add_argument("--config", required=required, help="workspace config file")


def _add_param_flags(sub):
    sub.add_argument("--params", help="JSON hyperparameter file written by tune")
    sub.add_argument("--trees", type=int, default=100, help="tree count")
    sub.add_argument("--depth", type=int, default=None, help="max depth (default unbounded)")
    sub.add_argument("--min-split", type=int, default=2, help="min samples to split a node")
    sub.add_argument("--min-leaf", type=int, default=1, help="min samples per leaf")
    sub.add_argument(
        "--features-per-split", default="sqrt", help="candidate features per split (sqrt|log2|int)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disinfotriage",
        description="Infrastructure-based triage of disinformation domains.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("probe", help="probe one domain and print its evidence record")
    p.add_argument("--domain", required=True, help="domain to probe")
    p.add_argument("--out", help="write the record JSON here instead of stdout")
    _add_config(p)
    p.set_defaults(handler=_cmd_probe)

    p = commands.add_parser("extract", help="recompute feature vectors from archived evidence")
    p.add_argument("--archive", required=True, help="evidence archive (JSONL)")
    p.add_argument("--out", help="write JSONL here instead of stdout")
    _add_config(p)
    p.set_defaults(handler=_cmd_extract)

    p = commands.add_parser("train", help="train a forest on a labeled dataset")
    p.add_argument("--dataset", required=True, help="labeled dataset CSV")
    p.add_argument("--out", default="model.json", help="model output path")
    p.add_argument(
        "--feature-set", choices=FEATURE_SETS, default="all",
        help="restrict training to a feature category subset",
    )
    _add_param_flags(p)
    _add_seed(p)
    p.set_defaults(handler=_cmd_train)

    p = commands.add_parser("tune", help="random hyperparameter search with k-fold scoring")
    p.add_argument("--dataset", required=True, help="labeled dataset CSV")
    p.add_argument("--iters", type=int, default=25, help="settings to sample")
    p.add_argument("--k", type=int, default=5, help="cross-validation folds")
    p.add_argument("--max-trees", type=int, default=None,
                   help="cap the searched tree counts (keeps runs affordable)")
    p.add_argument("--out", help="write chosen params as JSON")
    _add_seed(p)
    p.set_defaults(handler=_cmd_tune)

    p = commands.add_parser("evaluate", help="k-fold cross-validated metrics on a dataset")
    p.add_argument("--dataset", required=True, help="labeled dataset CSV")
    p.add_argument("--k", type=int, default=5, help="cross-validation folds")
    p.add_argument(
        "--feature-set", choices=FEATURE_SETS, default="all",
        help="evaluate on a feature category subset",
    )
    p.add_argument("--out", help="write the report JSON here")
    p.add_argument("--curves", help="directory for ROC/PR curve CSVs")
    _add_param_flags(p)
    _add_seed(p)
    p.set_defaults(handler=_cmd_evaluate)

    p = commands.add_parser("classify", help="classify domains with freshness-aware reuse")
    p.add_argument("--domain", help="one domain")
    p.add_argument("--input", help="file with one domain per line")
    _add_config(p, required=True)
    p.set_defaults(handler=_cmd_classify)

    p = commands.add_parser("replay", help="run the full pipeline over the configured feeds")
    _add_config(p, required=True)
    p.set_defaults(handler=_cmd_replay)

    p = commands.add_parser("serve", help="serve the HTTP API and moderation endpoints")
    _add_config(p, required=True)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # anything unexpected is a runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
