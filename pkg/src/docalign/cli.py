"""Command-line interface.

Subcommands mirror the pipeline stages; `run` executes everything from a
single config document. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import align_cda, align_url, corpus, evaluation, lexicon, miner, vectorspace
from .errors import DocalignError, UsageError
from .pipeline import WORKERS_ENV, PipelineConfig, run_pipeline, _sorted_pairs

log = logging.getLogger("docalign")


def _add_ingest(sub):
    p = sub.add_parser("ingest", help="parse records and partition by domain")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["jsonl", "tsv"], default="jsonl")
    p.add_argument("--out", required=True)
    p.add_argument("--lang-confidence", type=float, default=0.5)
    p.add_argument("--no-detect", action="store_true",
                   help="keep 'und' instead of running language detection")
    p.set_defaults(func=cmd_ingest)


def cmd_ingest(args) -> int:
    detector = None
    records = []
    with open(args.input, "rb") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = corpus.parse_record(line, args.format)
            if rec.lang == "und" and not args.no_detect:
                if detector is None:
                    from .langid import default_detector

                    detector = default_detector()
                rec.lang = corpus.detect_language(
                    rec.tokens, detector, args.lang_confidence
                )
            records.append(rec)
    partitions = corpus.group_by_domain(records)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    corpus.write_partitions(partitions, args.out)
    print(f"ingested {len(records)} records into {len(partitions)} domains")
    return 0


def _add_build_lexicon(sub):
    p = sub.add_parser("build-lexicon", help="build the pivot lexicon alignment")
    p.add_argument("--corpus", required=True, help="partitioned corpus directory")
    p.add_argument("--pivot", required=True)
    p.add_argument("--lang", required=True)
    p.add_argument("--table-fwd", help="pivot->lang probability TSV")
    p.add_argument("--table-bwd", help="lang->pivot probability TSV")
    p.add_argument("--emb-pivot", help="pivot embeddings (text format)")
    p.add_argument("--emb-other", help="other-language embeddings")
    p.add_argument("--top-n", type=int, default=20)
    p.add_argument("--vocab-size", type=int, default=10000)
    p.add_argument("--skip-top-k", type=int, default=100)
    p.add_argument("--out", required=True, help="output alignment TSV")
    p.set_defaults(func=cmd_build_lexicon)


def cmd_build_lexicon(args) -> int:
    partitions = corpus.read_partitions(args.corpus)

    def vocab_for(lang):
        docs = (
            d.tokens
            for domain in sorted(partitions)
            for d in partitions[domain].docs(lang)
        )
        return vectorspace.build_vocabulary(docs, args.skip_top_k, args.vocab_size)

    if args.table_fwd and args.table_bwd:
        p_fwd = lexicon.load_translation_table(args.table_fwd, args.pivot, args.lang)
        p_bwd = lexicon.load_translation_table(args.table_bwd, args.lang, args.pivot)
    elif args.emb_pivot and args.emb_other:
        p_fwd, p_bwd = lexicon.table_from_embeddings(
            lexicon.load_embeddings(args.emb_pivot),
            lexicon.load_embeddings(args.emb_other),
            top_n=args.top_n, src_lang=args.pivot, tgt_lang=args.lang,
        )
    else:
        raise UsageError("give --table-fwd/--table-bwd or --emb-pivot/--emb-other")
    align = lexicon.build_alignment(
        p_fwd, p_bwd, vocab_for(args.pivot).words, vocab_for(args.lang).words
    )
    lexicon.save_alignment(align, p_fwd, p_bwd, args.out)
    print(f"wrote {len(align.to_pivot)} lexicon entries to {args.out}")
    return 0


def _add_vectorize(sub):
    p = sub.add_parser("vectorize", help="TF-IDF vectors in the pivot space")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pivot", required=True)
    p.add_argument("--langs", default="", help="comma-separated non-pivot languages")
    p.add_argument("--lexicon", help="directory of <lang>.tsv alignments")
    p.add_argument("--vocab-size", type=int, default=10000)
    p.add_argument("--skip-top-k", type=int, default=100)
    p.add_argument("--stopwords")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_vectorize)


def cmd_vectorize(args) -> int:
    partitions = corpus.read_partitions(args.corpus)
    langs = [l for l in args.langs.split(",") if l]
    stopwords = None
    if args.stopwords:
        with open(args.stopwords, encoding="utf-8") as fh:
            stopwords = {line.strip().lower() for line in fh if line.strip()}

    def docs_of(lang):
        return [
            d
            for domain in sorted(partitions)
            for d in partitions[domain].docs(lang)
        ]

    pivot_vocab = vectorspace.build_vocabulary(
        (d.tokens for d in docs_of(args.pivot)), args.skip_top_k,
        args.vocab_size, stopwords,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    vectorspace.save_vocabulary(pivot_vocab, out / f"vocab_{args.pivot}.txt")

    for lang in [args.pivot, *langs]:
        if lang == args.pivot:
            mapped = [(d.url, d.tokens) for d in docs_of(lang)]
        else:
            if not args.lexicon:
                raise UsageError("--lexicon required when vectorizing non-pivot languages")
            align = lexicon.load_alignment(
                Path(args.lexicon) / f"{lang}.tsv", args.pivot, lang
            )
            mapped = [(d.url, lexicon.map_document(d, align)) for d in docs_of(lang)]
        if not mapped:
            (out / f"{lang}.tsv").write_text("")
            continue
        idf = vectorspace.compute_idf((t for _u, t in mapped), pivot_vocab)
        vectorspace.save_idf(idf, pivot_vocab, out / f"idf_{lang}.tsv")
        vectorspace.save_vectors(
            (vectorspace.vectorize(t, pivot_vocab, idf, doc_url=u) for u, t in mapped),
            out / f"{lang}.tsv",
        )
    print(f"vectorized {1 + len(langs)} language collections into {out}")
    return 0


def _add_align_cda(sub):
    p = sub.add_parser("align-cda", help="content-based alignment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pivot", required=True)
    p.add_argument("--langs", required=True)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--matching", choices=["greedy", "top1-then-greedy"],
                   default="greedy")
    p.add_argument("--vectors", required=True, help="directory of <lang>.tsv vectors")
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get(WORKERS_ENV, "1")))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align_cda)


def cmd_align_cda(args) -> int:
    partitions = corpus.read_partitions(args.corpus)
    langs = [l for l in args.langs.split(",") if l]
    vectors = {}
    for lang in [args.pivot, *langs]:
        path = Path(args.vectors) / f"{lang}.tsv"
        if not path.is_file():
            raise UsageError(f"no vector file for language {lang!r}: {path}")
        vectors[lang] = vectorspace.load_vectors(path)
    stats: dict = {}
    pairs = align_cda.align_corpus(
        partitions, vectors, args.pivot, langs, args.threshold,
        matching=args.matching, workers=args.workers, stats=stats,
    )
    align_cda.save_pairs(_sorted_pairs(pairs), args.out)
    print(
        f"{len(pairs)} pairs written to {args.out} "
        f"(scored {stats['scored_pairs']}/{stats['possible_pairs']} candidates)"
    )
    return 0


def _add_align_url(sub):
    p = sub.add_parser("align-url", help="URL-matching baseline alignment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pivot", required=True)
    p.add_argument("--langs", required=True)
    p.add_argument("--ids", help="identifier file (default: bundled set)")
    p.add_argument("--strip-hostname", action="store_true")
    p.add_argument("--no-query-values", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align_url)


def cmd_align_url(args) -> int:
    partitions = corpus.read_partitions(args.corpus)
    ids = (
        align_url.load_identifier_set(args.ids)
        if args.ids
        else align_url.default_identifier_set()
    )
    pairs = align_url.align_corpus_by_url(
        partitions, args.pivot, [l for l in args.langs.split(",") if l], ids,
        strip_query_params=not args.no_query_values,
        strip_hostname=args.strip_hostname,
    )
    align_cda.save_pairs(_sorted_pairs(pairs), args.out)
    print(f"{len(pairs)} pairs written to {args.out}")
    return 0


def _add_mine_ids(sub):
    p = sub.add_parser("mine-ids", help="mine language-identifier candidates")
    p.add_argument("--pairs", required=True)
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument("--no-indel", action="store_true",
                   help="substitutions only; ignore insertion/deletion diffs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mine_ids)


def cmd_mine_ids(args) -> int:
    pairs = align_cda.load_pairs(args.pairs)
    candidates = miner.mine_identifiers(
        pairs, min_support=args.min_support, allow_indel=not args.no_indel
    )
    miner.save_candidates(candidates, args.out)
    print(f"{len(candidates)} candidates written to {args.out} for curation")
    return 0


def _add_evaluate(sub):
    p = sub.add_parser("evaluate", help="recall against gold pairs")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--no-refilter", action="store_true",
                   help="skip the greedy 1-1 refilter before scoring")
    p.add_argument("--json", dest="json_out", help="also write the report as JSON")
    p.set_defaults(func=cmd_evaluate)


def cmd_evaluate(args) -> int:
    gold = evaluation.load_gold(args.gold)
    report = evaluation.evaluate_recall(
        align_cda.load_pairs(args.pred), gold,
        enforce_one_to_one=not args.no_refilter,
    )
    print(evaluation.format_report(report))
    if args.json_out:
        Path(args.json_out).write_text(
            json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
        )
    return 0


def _add_run(sub):
    p = sub.add_parser("run", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config's output directory")
    p.set_defaults(func=cmd_run)


def cmd_run(args) -> int:
    cfg = PipelineConfig.from_file(args.config, out_override=args.out)
    out = run_pipeline(cfg)
    print(f"pipeline complete; artifacts in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docalign",
        description="Align multilingual web documents within domains.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_ingest, _add_build_lexicon, _add_vectorize, _add_align_cda,
                _add_align_url, _add_mine_ids, _add_evaluate, _add_run):
        add(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except DocalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
