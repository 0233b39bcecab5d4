"""Command-line interface.

Subcommands: ingest, train, eval, tune-dedup, tune-eps, run-batch, serve,
and make-corpus (synthetic labeled data for smoke runs and demos).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config, with_overrides
from .corpus import load_articles, load_labeled_docs, parse_timestamp, save_articles
from .dedup import load_stopwords
from .evaluate import load_pairs, run_experiment, tune_dedup, tune_eps
from .features.lexicon import builtin_lexicons, load_lexicon
from .features.pipeline import ALL_FAMILIES, FeaturePipeline
from .model import Model, save_model, train
from .runner import run_batch
from .synthetic import planted_corpus, save_labeled_corpus

logger = logging.getLogger(__name__)


def _float_list(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


def _int_list(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def cmd_ingest(args) -> int:
    articles = load_articles(args.input, format=args.format)
    save_articles(articles, args.out)
    print(f"ingested {len(articles)} articles -> {args.out}")
    return 0


def cmd_train(args) -> int:
    from .corpus import PROPAGANDA

    docs = load_labeled_docs(args.corpus)
    families = {f.strip() for f in args.features.split(",") if f.strip()}
    lexicons = []
    if "lexicon" in families:
        lexicons = [load_lexicon(p) for p in args.lexicon] if args.lexicon else builtin_lexicons()
    pipeline = FeaturePipeline(flags=families, lexicons=lexicons, min_df=args.min_df)
    texts = [d.text for d in docs]
    labels = [1 if d.label == PROPAGANDA else 0 for d in docs]
    pipeline.fit(texts)
    features = [pipeline.assemble(t) for t in texts]
    model = train(features, labels, l2_lambda=args.l2, pipeline=pipeline, max_iter=args.max_iter)
    save_model(model, args.out)
    summary = model.train_summary or {}
    print(
        f"trained on {len(docs)} docs, {len(model.weights)} features, "
        f"{summary.get('n_iter')} iterations ({summary.get('stop_reason')}) -> {args.out}"
    )
    return 0


def cmd_eval(args) -> int:
    report = run_experiment(
        args.corpus,
        train_fraction=args.split,
        seed=args.seed,
        l2_lambda=args.l2,
        min_df=args.min_df,
    )
    print(f"split: {report.n_train} train / {report.n_test} test (seed {args.seed})")
    for name, rep in (("ngram-baseline", report.baseline), ("full", report.full)):
        print(
            f"{name:>15}: P={rep.precision:.4f} R={rep.recall:.4f} F1={rep.f1:.4f} "
            f"(tp={rep.tp} fp={rep.fp} fn={rep.fn} tn={rep.tn})"
        )
    mc = report.mcnemar_full_vs_baseline
    print(f"mcnemar full-vs-baseline: b={mc.b} c={mc.c} stat={mc.statistic:.4f} p={mc.p_value:.6f}")
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(report.as_dict(), indent=2), encoding="utf-8")
        print(f"report -> {args.json_out}")
    return 0


def cmd_tune_dedup(args) -> int:
    pairs = load_pairs(args.pairs)
    stopwords = load_stopwords(args.stopwords) if args.stopwords else None
    result = tune_dedup(pairs, _int_list(args.n_grid), _float_list(args.theta_grid), stopwords)
    print(f"{'n':>3} {'theta':>6} {'F1':>7} {'P':>7} {'R':>7}")
    for cell in result.table:
        print(
            f"{cell.n:>3} {cell.theta:>6.2f} {cell.f1:>7.4f} "
            f"{cell.precision:>7.4f} {cell.recall:>7.4f}"
        )
    print(f"best: n={result.best_n} theta={result.best_theta} F1={result.best_f1:.4f}")
    return 0


def cmd_tune_eps(args) -> int:
    docs = []
    for line in Path(args.docs).read_text(encoding="utf-8").splitlines():
        if line.strip():
            group, _, text = line.partition("\t")
            docs.append((group, text))
    result = tune_eps(docs, _float_list(args.eps_grid), min_members=args.min_members)
    print(f"{'eps':>5} {'F1':>7} {'P':>7} {'R':>7} {'clusters':>9} {'noise':>6}")
    for cell in result.table:
        print(
            f"{cell.eps:>5.2f} {cell.f1:>7.4f} {cell.precision:>7.4f} "
            f"{cell.recall:>7.4f} {cell.n_clusters:>9} {cell.n_noise:>6}"
        )
    print(f"best: eps={result.best_eps} F1={result.best_f1:.4f}")
    return 0


def cmd_run_batch(args) -> int:
    config = load_config(args.config)
    config = with_overrides(
        config,
        data_dir=args.data_dir,
        articles_path=args.articles,
        model_path=args.model,
    )
    window_end = parse_timestamp(args.window_end)
    run = run_batch(config, window_end)
    print(f"run {run.run_id}: {run.counts}")
    print(f"manifest: {run.manifest_path}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    config = load_config(args.config)
    config = with_overrides(
        config,
        port=args.port,
        data_dir=args.data_dir,
        model_path=args.model,
        webui_dir=args.webui_dir,
    )
    serve(config, host=args.host)
    return 0


def cmd_make_corpus(args) -> int:
    docs = planted_corpus(n_docs=args.n_docs, seed=args.seed)
    save_labeled_corpus(docs, args.out)
    print(f"wrote {len(docs)} labeled docs -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newswatch", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize an article file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=["jsonl", "tsv"], default="jsonl")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train a propaganda-index model")
    p.add_argument("--corpus", required=True, help="label<TAB>text file")
    p.add_argument("--features", default=",".join(ALL_FAMILIES))
    p.add_argument("--l2", type=float, default=1.0)
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--lexicon", action="append", help="extra lexicon file (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="run the baseline-vs-full experiment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--l2", type=float, default=1.0)
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tune-dedup", help="grid-search n and theta on labeled pairs")
    p.add_argument("--pairs", required=True, help="label<TAB>textA<TAB>textB file")
    p.add_argument("--n-grid", default="1,2,3,4,5")
    p.add_argument("--theta-grid", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--stopwords")
    p.set_defaults(func=cmd_tune_dedup)

    p = sub.add_parser("tune-eps", help="grid-search the clustering radius")
    p.add_argument("--docs", required=True, help="group_id<TAB>text file")
    p.add_argument("--eps-grid", default="0.2,0.3,0.4,0.5,0.55,0.6,0.7,0.8")
    p.add_argument("--min-members", type=int, default=2)
    p.set_defaults(func=cmd_tune_eps)

    p = sub.add_parser("run-batch", help="process one window and persist events")
    p.add_argument("--window-end", required=True, help="ISO-8601 timestamp")
    p.add_argument("--articles")
    p.add_argument("--model")
    p.add_argument("--data-dir")
    p.add_argument("--config")
    p.set_defaults(func=cmd_run_batch)

    p = sub.add_parser("serve", help="serve the HTTP API and web UI")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--model")
    p.add_argument("--data-dir")
    p.add_argument("--webui-dir")
    p.add_argument("--config")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("make-corpus", help="generate the synthetic labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n-docs", type=int, default=5000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_make_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
