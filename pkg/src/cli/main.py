"""
WESPAD Command Line

Subcommands: train, predict, cv, grid, ablate, sweep-k, sweep-pos, mine,
gen-fixture.

Exit codes: 0 success, 2 input error, 3 fit error, 4 bundle error.

Usage:
    wespad gen-fixture --seed 7 --out fixture/
    wespad cv --posts fixture/posts.jsonl --embeddings fixture/embeddings.txt \\
        --trees fixture/trees.conll --baseline me_lex --baseline wespad --out reports/
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import structlog
from pydantic import ValidationError

from src.corpus.folds import stratified_folds
from src.domain.errors import InputError, MissingInputError, WespadError
from src.domain.posts import Corpus
from src.corpus.tokenizer import tokenize
from src.embeddings.table import EmbeddingTable
from src.evaluation.cross_validation import DEFAULT_ALPHAS, DEFAULT_KS, GridSpec, cross_validate
from src.evaluation.experiments import (
    Baseline,
    ablate,
    baseline_config,
    evaluate_by_topic,
    paired_t_test,
    partition_sweep,
    positive_fraction_sweep,
    run_baseline,
)
from src.evaluation.reports import write_cv_report, write_sweep, write_table
from src.evaluation.synthetic import generate_fixture, write_fixture
from src.ingestion.conll_parser import attach_trees, load_conll
from src.ingestion.embedding_loader import load_embeddings
from src.ingestion.post_loader import POST_FORMATS, load_posts
from src.cli.manifest import RunManifest
from src.treebank.mining import mine_frequent_subtrees
from src.utils.config import EMBEDDING_FORMATS, get_config
from src.utils.logging import log_execution, setup_logging
from src.wespad.bundle import bundle_from_dict, embeddings_ref, read_bundle, save_bundle, verify_embeddings
from src.wespad.config import FeatureGroup, WespadConfig, load_config
from src.wespad.model import fit_wespad, needs_embeddings, predict_many

logger = structlog.get_logger(__name__)

ABLATION_GROUPS = (
    FeatureGroup.DISTORTION,
    FeatureGroup.PARTITIONING,
    FeatureGroup.CONTEXT_NEXT,
    FeatureGroup.SYN,
    FeatureGroup.CONTEXT_PREV,
    FeatureGroup.LEX,
)


# Argument wiring


def _add_input_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("inputs")
    group.add_argument("--posts", type=Path, required=True, help="Labeled posts file")
    group.add_argument("--posts-format", choices=POST_FORMATS, default="jsonl")
    group.add_argument(
        "--embeddings",
        type=Path,
        default=None,
        help="Embedding table (default: $WESPAD_EMBEDDINGS)",
    )
    group.add_argument("--embeddings-format", choices=EMBEDDING_FORMATS, default=None)
    group.add_argument("--trees", type=Path, default=None, help="CoNLL dependency trees")
    group.add_argument("--conll-id-col", type=int, default=0)
    group.add_argument("--conll-form-col", type=int, default=1)
    group.add_argument("--conll-head-col", type=int, default=6)


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model configuration (flags override --config)")
    group.add_argument("--config", type=Path, default=None, help="Flat JSON WespadConfig")
    group.add_argument("--alpha", type=float)
    group.add_argument("--alpha2", type=float)
    group.add_argument("--k", dest="k_partitions", type=int)
    group.add_argument("--k2", dest="k2_partitions", type=int)
    group.add_argument("--l2", type=float)
    group.add_argument("--min-support", type=int)
    group.add_argument("--min-size", type=int)
    group.add_argument("--max-size", type=int)
    group.add_argument("--seed", type=int)
    group.add_argument(
        "--disable",
        action="append",
        default=[],
        choices=[g.value for g in FeatureGroup],
        help="Remove a feature group (repeatable)",
    )
    group.add_argument(
        "--enable",
        action="append",
        default=[],
        choices=[g.value for g in FeatureGroup],
        help="Add a feature group (repeatable)",
    )
    group.add_argument("--per-class-mining", action="store_true", default=None)
    group.add_argument("--context-distorted", action="store_true", default=None)


def _add_cv_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--folds", type=int, default=10)
    parser.add_argument("--jobs", type=int, default=None, help="Concurrent CV rounds (default: $WESPAD_JOBS)")
    parser.add_argument("--out", type=Path, default=None, help="Report directory (default: $REPORTS_DIR)")


def _add_grid_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid-alphas", type=float, nargs="+", default=list(DEFAULT_ALPHAS))
    parser.add_argument("--grid-ks", type=int, nargs="+", default=list(DEFAULT_KS))
    parser.add_argument("--untie-alpha", action="store_true", help="Search alpha2 independently of alpha")
    parser.add_argument("--untie-k", action="store_true", help="Search K2 independently of K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wespad",
        description="WESPAD personal health mention classifier",
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default: $LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="Fit a model and write a bundle")
    _add_input_args(p)
    _add_config_args(p)
    p.add_argument("--out", type=Path, required=True, help="Bundle path")

    p = sub.add_parser("predict", help="Label posts with a bundle")
    p.add_argument("--bundle", type=Path, required=True)
    _add_input_args(p)
    p.add_argument("--out", type=Path, default=None, help="JSONL output (default: stdout)")

    p = sub.add_parser("cv", help="Cross-validate baselines with fixed hyperparameters")
    _add_input_args(p)
    _add_config_args(p)
    _add_cv_args(p)
    p.add_argument(
        "--baseline",
        action="append",
        choices=[b.value for b in Baseline],
        default=None,
        help="Method to evaluate (repeatable; default: wespad)",
    )
    p.add_argument("--by-topic", action="store_true", help="Separate CV per post topic")

    p = sub.add_parser("grid", help="Cross-validate WESPAD with nested grid search")
    _add_input_args(p)
    _add_config_args(p)
    _add_cv_args(p)
    _add_grid_args(p)

    p = sub.add_parser("ablate", help="Feature ablation")
    _add_input_args(p)
    _add_config_args(p)
    _add_cv_args(p)
    _add_grid_args(p)
    p.add_argument("--no-grid", action="store_true", help="Use the config hyperparameters as is")
    p.add_argument(
        "--groups",
        nargs="+",
        default=[g.value for g in ABLATION_GROUPS],
        help="Groups to remove one at a time; join with '+' to remove together",
    )

    p = sub.add_parser("sweep-k", help="Partition-count sweep")
    _add_input_args(p)
    _add_config_args(p)
    _add_cv_args(p)
    p.add_argument("--ks", type=int, nargs="+", default=[1, 2, 3, 4, 5])

    p = sub.add_parser("sweep-pos", help="Positive-fraction sweep")
    _add_input_args(p)
    _add_config_args(p)
    _add_cv_args(p)
    _add_grid_args(p)
    p.add_argument("--no-grid", action="store_true", help="Use the config hyperparameters as is")
    p.add_argument("--fractions", type=float, nargs="+", default=[0.2, 0.4, 0.6, 0.8, 1.0])
    p.add_argument(
        "--baselines",
        nargs="+",
        choices=[b.value for b in Baseline],
        default=[Baseline.ME_LEX.value, Baseline.WESPAD.value],
    )

    p = sub.add_parser("mine", help="Mine frequent dependency subtrees")
    p.add_argument("--trees", type=Path, required=True)
    p.add_argument("--conll-id-col", type=int, default=0)
    p.add_argument("--conll-form-col", type=int, default=1)
    p.add_argument("--conll-head-col", type=int, default=6)
    p.add_argument("--min-support", type=int, default=10)
    p.add_argument("--min-size", type=int, default=2)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--out", type=Path, default=None, help="TSV output (default: stdout)")

    p = sub.add_parser("gen-fixture", help="Write the seeded synthetic corpus")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-posts", type=int, default=800)
    p.add_argument("--positive-rate", type=float, default=0.2)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--impure-cluster", action="store_true")
    p.add_argument(
        "--held-out-vocabulary",
        action="store_true",
        help="Swap positive class words for unseen embedding neighbours",
    )
    p.add_argument("--out", type=Path, required=True, help="Output directory")

    return parser


# Shared plumbing


def resolve_config(args: argparse.Namespace) -> WespadConfig:
    """--config file (or defaults) with command-line overrides applied."""
    config = load_config(args.config) if args.config else WespadConfig()
    overrides = {}
    for name in (
        "alpha", "alpha2", "k_partitions", "k2_partitions", "l2",
        "min_support", "min_size", "max_size", "seed", "per_class_mining", "context_distorted",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    for group in args.enable:
        overrides[group] = True
    for group in args.disable:
        overrides[group] = False
    return config.with_overrides(**overrides) if overrides else config


def _embeddings_path(args: argparse.Namespace, fallback: Optional[Path] = None) -> Path:
    path = args.embeddings or get_config().WESPAD_EMBEDDINGS or fallback
    if path is None:
        raise MissingInputError("No embedding table given: pass --embeddings or set WESPAD_EMBEDDINGS")
    if not Path(path).exists():
        raise MissingInputError(f"Embedding file not found: {path} (--embeddings)")
    return Path(path)


def _embeddings_format(args: argparse.Namespace) -> str:
    return args.embeddings_format or get_config().WESPAD_EMBEDDINGS_FORMAT


def _corpus_vocabulary(corpus: Corpus) -> set[str]:
    words: set[str] = set()
    for post in corpus:
        words.update(post.tokens)
        for text in (post.prev_text, post.next_text):
            if text:
                words.update(tokenize(text))
    return words


def load_inputs(
    args: argparse.Namespace,
    need_table: bool,
    manifest: RunManifest,
) -> tuple[Corpus, Optional[EmbeddingTable], Optional[Path]]:
    """Posts (with trees attached), the embedding table when `need_table`, and its path."""
    corpus = load_posts(args.posts, args.posts_format)
    manifest.add_input("posts", args.posts)
    if args.trees is not None:
        forests = load_conll(args.trees, args.conll_id_col, args.conll_form_col, args.conll_head_col)
        corpus, _ = attach_trees(corpus, forests)
        manifest.add_input("trees", args.trees)

    table, path = None, None
    if need_table:
        path = _embeddings_path(args)
        table = load_embeddings(path, _embeddings_format(args), vocabulary=_corpus_vocabulary(corpus))
        manifest.add_input("embeddings", path)
    return corpus, table, path


def _bundle_needs_embeddings(data) -> bool:
    config = data.get("config") if isinstance(data, dict) else None
    if not isinstance(config, dict):
        return False
    try:
        return needs_embeddings(WespadConfig(**config))
    except ValidationError:
        # bundle_from_dict reports the corrupt config
        return False


def _baselines_need_embeddings(baselines: Sequence[Baseline], config: WespadConfig) -> bool:
    return any(needs_embeddings(baseline_config(b, config)) for b in baselines)


def _out_dir(args: argparse.Namespace) -> Path:
    return Path(args.out) if args.out else get_config().REPORTS_DIR


def _jobs(args: argparse.Namespace) -> int:
    return args.jobs or get_config().WESPAD_JOBS


def _grid(args: argparse.Namespace) -> Optional[GridSpec]:
    if getattr(args, "no_grid", False):
        return None
    return GridSpec(
        alphas=tuple(args.grid_alphas),
        ks=tuple(args.grid_ks),
        tie_alpha=not args.untie_alpha,
        tie_k=not args.untie_k,
    )


def _finish(manifest: RunManifest, path: Path) -> None:
    manifest.finish().write(path)


# Commands


@log_execution(logger)
def cmd_train(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    manifest = RunManifest("train", config.seed, config.model_dump())
    corpus, table, emb_path = load_inputs(args, needs_embeddings(config), manifest)

    model = fit_wespad(corpus, config, table)
    if emb_path is not None:
        model = dataclasses.replace(model, embeddings_ref=embeddings_ref(emb_path, _embeddings_format(args)))
    bundle = save_bundle(model, args.out)
    manifest.add_outputs([bundle])
    _finish(manifest, bundle.with_name(bundle.name + ".manifest.json"))
    print(f"Model bundle written to {bundle}", file=sys.stderr)
    return 0


@log_execution(logger)
def cmd_predict(args: argparse.Namespace) -> int:
    data = read_bundle(args.bundle)
    corpus = load_posts(args.posts, args.posts_format)
    if args.trees is not None:
        forests = load_conll(args.trees, args.conll_id_col, args.conll_form_col, args.conll_head_col)
        corpus, _ = attach_trees(corpus, forests)

    table, path = None, None
    if _bundle_needs_embeddings(data):
        ref = data.get("embeddings") or {}
        path = _embeddings_path(args, Path(ref["path"]) if ref.get("path") else None)
        fmt = args.embeddings_format or ref.get("format") or _embeddings_format(args)
        # Unseen words resolve their IG through training words, so those stay too.
        vocabulary = _corpus_vocabulary(corpus)
        vocabulary.update((data.get("ig") or {}).get("table", {}))
        table = load_embeddings(path, fmt, vocabulary=vocabulary)

    model = bundle_from_dict(data, table)
    if path is not None:
        verify_embeddings(model, path)

    labels, probabilities = predict_many(model, list(corpus))
    lines = [
        json.dumps({"id": post.id, "label": label.value, "probability": float(p)}, ensure_ascii=False)
        for post, label, p in zip(corpus, labels, probabilities)
    ]
    text = "".join(line + "\n" for line in lines)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    logger.info("predictions_written", posts=len(lines), out=str(args.out) if args.out else "stdout")
    return 0


@log_execution(logger)
def cmd_cv(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    baselines = [Baseline(b) for b in (args.baseline or [Baseline.WESPAD.value])]
    manifest = RunManifest("cv", config.seed, config.model_dump())
    corpus, table, _ = load_inputs(args, _baselines_need_embeddings(baselines, config), manifest)
    out_dir = _out_dir(args)
    jobs = _jobs(args)

    if args.by_topic:
        frame = evaluate_by_topic(corpus, config, None, args.folds, config.seed, table, None, baselines, jobs)
        manifest.add_outputs([write_table(frame, out_dir / "by_topic.tsv")])
        _finish(manifest, out_dir / "manifest.json")
        return 0

    folds = stratified_folds(corpus, args.folds, config.seed)
    reports = [run_baseline(corpus, b, folds, table, config=config, jobs=jobs) for b in baselines]
    first = reports[0]
    for report in reports:
        tests = None
        if report is not first:
            tests = {first.name: paired_t_test(report, first)}
        manifest.add_outputs(write_cv_report(report, out_dir, tests=tests))
    manifest.plan_hash = folds.plan_hash
    _finish(manifest, out_dir / "manifest.json")
    for report in reports:
        print(
            f"{report.name}\tF1={report.mean_f1:.4f}\tP={report.mean_precision:.4f}\t"
            f"R={report.mean_recall:.4f}\tplan={report.plan_hash}"
        )
    return 0


@log_execution(logger)
def cmd_grid(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    manifest = RunManifest("grid", config.seed, config.model_dump())
    corpus, table, _ = load_inputs(args, needs_embeddings(config), manifest)
    out_dir = _out_dir(args)
    folds = stratified_folds(corpus, args.folds, config.seed)
    report = cross_validate(corpus, config, _grid(args), folds, table, jobs=_jobs(args), name="wespad_grid")
    manifest.add_outputs(write_cv_report(report, out_dir))
    manifest.plan_hash = folds.plan_hash
    _finish(manifest, out_dir / "manifest.json")
    print(f"{report.name}\tF1={report.mean_f1:.4f}\tplan={report.plan_hash}")
    return 0


@log_execution(logger)
def cmd_ablate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    manifest = RunManifest("ablate", config.seed, config.model_dump())
    corpus, table, _ = load_inputs(args, needs_embeddings(config), manifest)
    folds = stratified_folds(corpus, args.folds, config.seed)
    try:
        groups = [tuple(FeatureGroup(g) for g in entry.split("+")) for entry in args.groups]
    except ValueError as e:
        raise InputError(f"Unknown feature group in --groups: {e}") from e
    frame = ablate(corpus, folds, table, None, groups, config, _grid(args), jobs=_jobs(args))
    out_dir = _out_dir(args)
    manifest.add_outputs([write_table(frame, out_dir / "ablation.tsv")])
    _finish(manifest, out_dir / "manifest.json")
    print(frame.to_string(index=False))
    return 0


@log_execution(logger)
def cmd_sweep_k(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    manifest = RunManifest("sweep-k", config.seed, config.model_dump())
    corpus, table, _ = load_inputs(args, needs_embeddings(config), manifest)
    folds = stratified_folds(corpus, args.folds, config.seed)
    frame = partition_sweep(corpus, folds, table, None, args.ks, config.alpha, config, jobs=_jobs(args))
    out_dir = _out_dir(args)
    manifest.add_outputs(write_sweep(frame, out_dir, "sweep_k", x="k"))
    _finish(manifest, out_dir / "manifest.json")
    print(frame.to_string(index=False))
    return 0


@log_execution(logger)
def cmd_sweep_pos(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    manifest = RunManifest("sweep-pos", config.seed, config.model_dump())
    baselines = [Baseline(b) for b in args.baselines]
    corpus, table, _ = load_inputs(args, _baselines_need_embeddings(baselines, config), manifest)
    folds = stratified_folds(corpus, args.folds, config.seed)
    frame = positive_fraction_sweep(
        corpus,
        folds,
        table,
        None,
        args.fractions,
        baselines,
        config.seed,
        config,
        _grid(args),
        jobs=_jobs(args),
    )
    out_dir = _out_dir(args)
    manifest.add_outputs(write_sweep(frame, out_dir, "sweep_pos", x="fraction", method="baseline"))
    _finish(manifest, out_dir / "manifest.json")
    print(frame.to_string(index=False))
    return 0


@log_execution(logger)
def cmd_mine(args: argparse.Namespace) -> int:
    forests = load_conll(args.trees, args.conll_id_col, args.conll_form_col, args.conll_head_col)
    trees = [tree for forest in forests.values() for tree in forest.sentences]
    patterns = mine_frequent_subtrees(trees, args.min_support, args.min_size, args.max_size)
    lines = ["feature_index\tsize\tsupport\tpattern"]
    lines += [f"{p.feature_index}\t{p.size}\t{p.support}\t{p.render()}" for p in patterns]
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


@log_execution(logger)
def cmd_gen_fixture(args: argparse.Namespace) -> int:
    fixture = generate_fixture(
        seed=args.seed,
        n_posts=args.n_posts,
        positive_rate=args.positive_rate,
        dim=args.dim,
        impure_cluster=args.impure_cluster,
        held_out_vocabulary=args.held_out_vocabulary,
    )
    paths = write_fixture(fixture, args.out)
    for name, path in paths.items():
        print(f"{name}\t{path}")
    return 0


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "grid": cmd_grid,
    "ablate": cmd_ablate,
    "sweep-k": cmd_sweep_k,
    "sweep-pos": cmd_sweep_pos,
    "mine": cmd_mine,
    "gen-fixture": cmd_gen_fixture,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    env = get_config()
    setup_logging(log_level=args.log_level or env.LOG_LEVEL, logs_dir=env.LOGS_DIR)
    try:
        return COMMANDS[args.command](args)
    except WespadError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
