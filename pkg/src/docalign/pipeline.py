"""End-to-end pipeline: ingest -> lexicon -> vectorize -> align -> mine ->
evaluate, driven by one declarative config document.

Every stage is stamped with a content hash of its parameters and inputs;
a rerun with unchanged inputs skips the stage. The manifest records every
parameter and input digest, so identical configs and inputs reproduce every
artifact byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from . import align_cda, align_url, corpus, evaluation, lexicon, miner, vectorspace
from .errors import ConfigError

log = logging.getLogger(__name__)

WORKERS_ENV = "DOCALIGN_WORKERS"


@dataclass
class LanguageResource:
    """Translation model source for one non-pivot language: either a pair of
    IBM-1 style TSV tables or a pair of embedding files."""

    table_fwd: Optional[str] = None  # pivot -> lang
    table_bwd: Optional[str] = None  # lang -> pivot
    embeddings_pivot: Optional[str] = None
    embeddings_other: Optional[str] = None

    def paths(self) -> list[str]:
        return [p for p in (self.table_fwd, self.table_bwd,
                            self.embeddings_pivot, self.embeddings_other) if p]

    def validate(self, lang: str) -> None:
        has_tables = bool(self.table_fwd or self.table_bwd)
        has_emb = bool(self.embeddings_pivot or self.embeddings_other)
        if has_tables and has_emb:
            raise ConfigError(f"language {lang!r}: give tables or embeddings, not both")
        if has_tables and not (self.table_fwd and self.table_bwd):
            raise ConfigError(f"language {lang!r}: both table directions required")
        if has_emb and not (self.embeddings_pivot and self.embeddings_other):
            raise ConfigError(f"language {lang!r}: both embedding files required")
        if not has_tables and not has_emb:
            raise ConfigError(f"language {lang!r}: no translation resource configured")
        for p in self.paths():
            if not Path(p).is_file():
                raise ConfigError(f"language {lang!r}: resource file not found: {p}")


@dataclass
class PipelineConfig:
    input: str
    out: str
    pivot: str = "en"
    langs: list[str] = field(default_factory=list)
    format: str = "jsonl"
    resources: dict[str, LanguageResource] = field(default_factory=dict)
    vocab_size: int = 10000
    skip_top_k: int = 100
    stopwords: Optional[str] = None
    threshold: float = 0.1
    matching: str = "greedy"
    top_n: int = 20
    lang_confidence: float = 0.5
    detect_language: bool = True
    url_align: bool = False
    identifiers: Optional[str] = None
    mine: bool = False
    min_support: int = 1
    gold: Optional[str] = None
    workers: int = 1

    @classmethod
    def from_file(cls, path, out_override: Optional[str] = None) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        return cls.from_dict(raw, out_override=out_override)

    @classmethod
    def from_dict(cls, raw: dict, out_override: Optional[str] = None) -> "PipelineConfig":
        raw = dict(raw)
        resources = {
            lang: LanguageResource(**spec)
            for lang, spec in (raw.pop("resources", {}) or {}).items()
        }
        if out_override:
            raw["out"] = out_override
        if "workers" not in raw and os.environ.get(WORKERS_ENV):
            raw["workers"] = int(os.environ[WORKERS_ENV])
        try:
            cfg = cls(resources=resources, **raw)
        except TypeError as exc:
            raise ConfigError(f"bad config: {exc}") from exc
        if not cfg.input or not cfg.out:
            raise ConfigError("config requires 'input' and 'out'")
        return cfg

    def parameters(self) -> dict[str, Any]:
        """Everything that defines the run except the output location."""
        return {
            "input": self.input,
            "pivot": self.pivot,
            "langs": sorted(self.langs),
            "format": self.format,
            "resources": {
                lang: {k: v for k, v in vars(res).items() if v}
                for lang, res in sorted(self.resources.items())
            },
            "vocab_size": self.vocab_size,
            "skip_top_k": self.skip_top_k,
            "stopwords": self.stopwords,
            "threshold": self.threshold,
            "matching": self.matching,
            "top_n": self.top_n,
            "lang_confidence": self.lang_confidence,
            "detect_language": self.detect_language,
            "url_align": self.url_align,
            "identifiers": self.identifiers,
            "mine": self.mine,
            "min_support": self.min_support,
            "gold": self.gold,
        }


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def digest_of(obj: Any) -> str:
    payload = json.dumps(obj, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class _Stage:
    """Content-hash stamped unit of work."""

    def __init__(self, out_dir: Path, name: str, digest: str, outputs: list[Path]):
        self.name = name
        self.digest = digest
        self.outputs = outputs
        self.stamp_path = out_dir / ".stamps" / f"{name}.json"

    def fresh(self) -> bool:
        if not self.stamp_path.is_file():
            return False
        try:
            stamp = json.loads(self.stamp_path.read_text())
        except (OSError, json.JSONDecodeError):
            return False
        if stamp.get("digest") != self.digest:
            return False
        return all(p.exists() for p in self.outputs)

    def stamp(self) -> None:
        self.stamp_path.parent.mkdir(parents=True, exist_ok=True)
        self.stamp_path.write_text(
            json.dumps({"digest": self.digest, "outputs": [p.name for p in self.outputs]},
                       sort_keys=True)
        )


def _sorted_pairs(pairs: list[align_cda.AlignmentPair]) -> list[align_cda.AlignmentPair]:
    return sorted(
        pairs,
        key=lambda p: (p.domain, p.other_lang, -p.score, p.pivot_url, p.other_url),
    )


def run_pipeline(cfg: PipelineConfig) -> Path:
    """Execute all configured stages in dependency order; returns the
    artifact directory. Fails before any work if a configured language lacks
    its translation resource."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    failed_marker = out / "FAILED"
    if failed_marker.exists():
        failed_marker.unlink()

    # pre-flight: every configured language must have a usable resource
    for lang in sorted(cfg.langs):
        res = cfg.resources.get(lang)
        if res is None:
            raise ConfigError(f"no translation resource configured for language {lang!r}")
        res.validate(lang)
    if not Path(cfg.input).is_file():
        raise ConfigError(f"input file not found: {cfg.input}")

    manifest: dict[str, Any] = {
        "parameters": cfg.parameters(),
        "inputs": {},
        "stages": {},
        "outputs": {},
    }
    manifest["inputs"][cfg.input] = file_digest(cfg.input)
    for lang, res in sorted(cfg.resources.items()):
        for p in res.paths():
            manifest["inputs"][p] = file_digest(p)
    for optional in (cfg.gold, cfg.identifiers, cfg.stopwords):
        if optional:
            manifest["inputs"][optional] = file_digest(optional)

    current_stage = "setup"
    try:
        current_stage = "ingest"
        _stage_ingest(cfg, out, manifest)
        current_stage = "lexicon"
        _stage_lexicon(cfg, out, manifest)
        current_stage = "vectorize"
        _stage_vectorize(cfg, out, manifest)
        current_stage = "align"
        _stage_align(cfg, out, manifest)
        if cfg.mine:
            current_stage = "mine"
            _stage_mine(cfg, out, manifest)
        if cfg.gold:
            current_stage = "evaluate"
            _stage_evaluate(cfg, out, manifest)
    except Exception:
        failed_marker.write_text(current_stage + "\n")
        raise

    for path in sorted(out.rglob("*")):
        if path.is_file() and ".stamps" not in path.parts and path.name != "manifest.json":
            manifest["outputs"][path.relative_to(out).as_posix()] = file_digest(path)
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    )
    return out


# --- stages ----------------------------------------------------------------


def _stage_ingest(cfg: PipelineConfig, out: Path, manifest: dict) -> None:
    corpus_dir = out / "corpus"
    digest = digest_of({
        "stage": "ingest",
        "input": manifest["inputs"][cfg.input],
        "format": cfg.format,
        "lang_confidence": cfg.lang_confidence,
        "detect_language": cfg.detect_language,
    })
    stage = _Stage(out, "ingest", digest, [corpus_dir])
    manifest["stages"]["ingest"] = digest
    if stage.fresh():
        log.info("ingest: up to date, skipping")
        return
    records = []
    detector = None
    with open(cfg.input, "rb") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = corpus.parse_record(line, cfg.format)
            if rec.lang == "und" and cfg.detect_language:
                if detector is None:
                    from .langid import default_detector

                    detector = default_detector()
                rec.lang = corpus.detect_language(
                    rec.tokens, detector, cfg.lang_confidence
                )
            records.append(rec)
    partitions = corpus.group_by_domain(records)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    corpus.write_partitions(partitions, corpus_dir)
    stage.stamp()
    log.info("ingest: %d records over %d domains", len(records), len(partitions))


def _lang_tokens(partitions, lang: str):
    for domain in sorted(partitions):
        for doc in partitions[domain].docs(lang):
            yield doc


def _stage_lexicon(cfg: PipelineConfig, out: Path, manifest: dict) -> None:
    vocab_dir = out / "vocab"
    lex_dir = out / "lexicon"
    resource_digests = {
        lang: [manifest["inputs"][p] for p in res.paths()]
        for lang, res in sorted(cfg.resources.items())
    }
    digest = digest_of({
        "stage": "lexicon",
        "ingest": manifest["stages"]["ingest"],
        "vocab_size": cfg.vocab_size,
        "skip_top_k": cfg.skip_top_k,
        "stopwords": manifest["inputs"].get(cfg.stopwords),
        "top_n": cfg.top_n,
        "resources": resource_digests,
        "langs": sorted(cfg.langs),
        "pivot": cfg.pivot,
    })
    outputs = [vocab_dir / f"{cfg.pivot}.txt"]
    outputs += [vocab_dir / f"{lang}.txt" for lang in sorted(cfg.langs)]
    outputs += [lex_dir / f"{lang}.tsv" for lang in sorted(cfg.langs)]
    stage = _Stage(out, "lexicon", digest, outputs)
    manifest["stages"]["lexicon"] = digest
    if stage.fresh():
        log.info("lexicon: up to date, skipping")
        return

    partitions = corpus.read_partitions(out / "corpus")
    stopwords = _load_stopwords(cfg.stopwords)
    vocab_dir.mkdir(parents=True, exist_ok=True)
    lex_dir.mkdir(parents=True, exist_ok=True)

    vocabs: dict[str, vectorspace.Vocabulary] = {}
    for lang in [cfg.pivot, *sorted(cfg.langs)]:
        docs = (d.tokens for d in _lang_tokens(partitions, lang))
        vocabs[lang] = vectorspace.build_vocabulary(
            docs, cfg.skip_top_k, cfg.vocab_size, stopwords
        )
        vectorspace.save_vocabulary(vocabs[lang], vocab_dir / f"{lang}.txt")

    for lang in sorted(cfg.langs):
        res = cfg.resources[lang]
        if res.table_fwd:
            p_fwd = lexicon.load_translation_table(res.table_fwd, cfg.pivot, lang)
            p_bwd = lexicon.load_translation_table(res.table_bwd, lang, cfg.pivot)
        else:
            emb_pivot = lexicon.load_embeddings(res.embeddings_pivot)
            emb_other = lexicon.load_embeddings(res.embeddings_other)
            p_fwd, p_bwd = lexicon.table_from_embeddings(
                emb_pivot, emb_other, top_n=cfg.top_n,
                src_lang=cfg.pivot, tgt_lang=lang,
            )
        if not vocabs[cfg.pivot].words or not vocabs[lang].words:
            # no documents for one side: emit an empty lexicon
            (lex_dir / f"{lang}.tsv").write_text("")
            continue
        align = lexicon.build_alignment(
            p_fwd, p_bwd, vocabs[cfg.pivot].words, vocabs[lang].words
        )
        violations = lexicon.reverse_condition_violations(
            align, p_fwd, p_bwd, vocabs[cfg.pivot].words
        )
        if violations:
            log.info("lexicon %s: %d pairs violate the reverse argmax condition",
                     lang, violations)
        lexicon.save_alignment(align, p_fwd, p_bwd, lex_dir / f"{lang}.tsv")
    stage.stamp()


def _load_stopwords(path: Optional[str]) -> Optional[set[str]]:
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return {line.strip().lower() for line in fh if line.strip()}


def _stage_vectorize(cfg: PipelineConfig, out: Path, manifest: dict) -> None:
    vec_dir = out / "vectors"
    idf_dir = out / "idf"
    digest = digest_of({
        "stage": "vectorize",
        "lexicon": manifest["stages"]["lexicon"],
    })
    langs = [cfg.pivot, *sorted(cfg.langs)]
    outputs = [vec_dir / f"{lang}.tsv" for lang in langs]
    outputs += [idf_dir / f"{lang}.tsv" for lang in langs]
    stage = _Stage(out, "vectorize", digest, outputs)
    manifest["stages"]["vectorize"] = digest
    if stage.fresh():
        log.info("vectorize: up to date, skipping")
        return

    partitions = corpus.read_partitions(out / "corpus")
    pivot_vocab = vectorspace.load_vocabulary(out / "vocab" / f"{cfg.pivot}.txt")
    vec_dir.mkdir(parents=True, exist_ok=True)
    idf_dir.mkdir(parents=True, exist_ok=True)

    for lang in langs:
        if lang == cfg.pivot:
            mapped = [(d.url, d.tokens) for d in _lang_tokens(partitions, lang)]
        else:
            align = lexicon.load_alignment(
                out / "lexicon" / f"{lang}.tsv", cfg.pivot, lang
            )
            mapped = [
                (d.url, lexicon.map_document(d, align))
                for d in _lang_tokens(partitions, lang)
            ]
        if not mapped:
            (vec_dir / f"{lang}.tsv").write_text("")
            (idf_dir / f"{lang}.tsv").write_text("#collection_size\t0\t0\n")
            continue
        idf = vectorspace.compute_idf((t for _u, t in mapped), pivot_vocab)
        vectorspace.save_idf(idf, pivot_vocab, idf_dir / f"{lang}.tsv")
        vectors = (
            vectorspace.vectorize(tokens, pivot_vocab, idf, doc_url=url)
            for url, tokens in mapped
        )
        vectorspace.save_vectors(vectors, vec_dir / f"{lang}.tsv")
    stage.stamp()


def _stage_align(cfg: PipelineConfig, out: Path, manifest: dict) -> None:
    pairs_path = out / "pairs.tsv"
    url_pairs_path = out / "pairs_url.tsv"
    digest = digest_of({
        "stage": "align",
        "vectorize": manifest["stages"]["vectorize"],
        "threshold": cfg.threshold,
        "matching": cfg.matching,
        "url_align": cfg.url_align,
        "identifiers": manifest["inputs"].get(cfg.identifiers),
    })
    outputs = [pairs_path] + ([url_pairs_path] if cfg.url_align else [])
    stage = _Stage(out, "align", digest, outputs)
    manifest["stages"]["align"] = digest
    if stage.fresh():
        log.info("align: up to date, skipping")
        return

    partitions = corpus.read_partitions(out / "corpus")
    vectors = {
        lang: vectorspace.load_vectors(out / "vectors" / f"{lang}.tsv")
        for lang in [cfg.pivot, *sorted(cfg.langs)]
    }
    stats: dict = {}
    pairs = align_cda.align_corpus(
        partitions, vectors, cfg.pivot, cfg.langs, cfg.threshold,
        matching=cfg.matching, workers=cfg.workers, stats=stats,
    )
    align_cda.save_pairs(_sorted_pairs(pairs), pairs_path)
    log.info("align: %d pairs; scored %d of %d possible candidates",
             len(pairs), stats["scored_pairs"], stats["possible_pairs"])

    if cfg.url_align:
        ids = (
            align_url.load_identifier_set(cfg.identifiers)
            if cfg.identifiers
            else align_url.default_identifier_set()
        )
        url_pairs = align_url.align_corpus_by_url(
            partitions, cfg.pivot, cfg.langs, ids
        )
        align_cda.save_pairs(_sorted_pairs(url_pairs), url_pairs_path)
    stage.stamp()


def _stage_mine(cfg: PipelineConfig, out: Path, manifest: dict) -> None:
    candidates_path = out / "candidates.tsv"
    digest = digest_of({
        "stage": "mine",
        "align": manifest["stages"]["align"],
        "min_support": cfg.min_support,
    })
    stage = _Stage(out, "mine", digest, [candidates_path])
    manifest["stages"]["mine"] = digest
    if stage.fresh():
        log.info("mine: up to date, skipping")
        return
    pairs = align_cda.load_pairs(out / "pairs.tsv")
    candidates = miner.mine_identifiers(pairs, min_support=cfg.min_support)
    miner.save_candidates(candidates, candidates_path)
    stage.stamp()


def _stage_evaluate(cfg: PipelineConfig, out: Path, manifest: dict) -> None:
    report_path = out / "report.json"
    digest = digest_of({
        "stage": "evaluate",
        "align": manifest["stages"]["align"],
        "gold": manifest["inputs"][cfg.gold],
    })
    stage = _Stage(out, "evaluate", digest, [report_path])
    manifest["stages"]["evaluate"] = digest
    if stage.fresh():
        log.info("evaluate: up to date, skipping")
        return
    gold = evaluation.load_gold(cfg.gold)
    reports = {
        "cda": evaluation.evaluate_recall(
            align_cda.load_pairs(out / "pairs.tsv"), gold
        ).as_dict()
    }
    if cfg.url_align and (out / "pairs_url.tsv").is_file():
        reports["url"] = evaluation.evaluate_recall(
            align_cda.load_pairs(out / "pairs_url.tsv"), gold
        ).as_dict()
    report_path.write_text(
        json.dumps(reports, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    )
    stage.stamp()
