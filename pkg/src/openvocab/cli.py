"""Command-line front end.

Each stage reads and writes plain files so stages can run as separate
invocations. Exit status: 0 ok, 1 usage error, 2 bad or missing data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import synth
from .asr_sim import (VocabularyModel, build_vocabulary, read_transcribed,
                      syllable_inventory, write_transcribed)
from .binio import FormatError
from .completion import CompletionIndex, build_completion_index
from .config import Config, load_config, parse_config
from .corpus import CorpusError, default_stoplist, ingest, load_stoplist, split_terms, tokenize_all, write_jsonl
from .kernels import BACKEND
from .metrics import (EvaluationError, OovCounts, RunResult, average_precision, format_run, load_qrels,
                      mean, oov_metrics, read_run, write_qrels, write_run)
from .phonetics import Syllabifier, syllabify as default_syllabify
from .pipeline import METHODS, System, run_experiment, transcribe_all, two_stage
from .retrieval import InvertedIndex, RankedList, build_index, search

log = logging.getLogger("openvocab")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- shared helpers -----------------------------------------------------------

def _stoplist(args):
    return load_stoplist(args.stoplist) if args.stoplist else default_stoplist()


def _syllabifier(args):
    return Syllabifier.from_file(args.lexicon) if getattr(args, "lexicon", None) else default_syllabify


def _config(args) -> Config:
    cfg = load_config(args.config) if getattr(args, "config", None) else Config()
    overrides = getattr(args, "set", None) or []
    if overrides:
        cfg = parse_config("\n".join(overrides), cfg)
    return cfg


def _system(args, cfg: Config) -> System:
    index = InvertedIndex.load(args.index)
    ci = CompletionIndex.load(args.completion) if args.completion else None
    vocab = VocabularyModel.load(args.vocab) if args.vocab else None
    syl = _syllabifier(args)
    return System(index, ci, vocab, _stoplist(args), syl, syllable_inventory(index.postings, syl))


def _add_common(p, config=False, stoplist=True, lexicon=False):
    if stoplist:
        p.add_argument("--stoplist", help="one stopword per line (default: built-in list)")
    if lexicon:
        p.add_argument("--lexicon", help="word<TAB>space-separated syllables overrides")
    if config:
        p.add_argument("--config", help="key = value settings file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting")


# --- subcommands ----------------------------------------------------------------

def cmd_generate(args):
    col = synth.generate(n_docs=args.docs, n_topics=args.topics, subtopics=args.subtopics,
                         n_queries=args.queries, seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(col.docs, out / "docs.jsonl")
    write_jsonl(col.queries, out / "queries.jsonl")
    write_qrels(col.qrels, out / "qrels.txt")
    (out / "vocab_size.txt").write_text(f"{col.vocab_size}\n")
    print(f"wrote {len(col.docs)} docs, {len(col.queries)} queries to {out} (vocabulary cut K={col.vocab_size})")


def cmd_build_index(args):
    docs = tokenize_all(ingest(args.docs), _stoplist(args))
    index = build_index(docs)
    index.save(args.out)
    print(f"indexed {index.N} documents, {len(index.postings)} terms -> {args.out}")


def cmd_build_completion_index(args):
    docs = tokenize_all(ingest(args.docs), _stoplist(args))
    ci = build_completion_index(docs, _syllabifier(args))
    ci.save(args.out)
    print(f"completion index: {len(ci.entries)} entries -> {args.out}")


def cmd_build_vocab(args):
    if args.K < 1:
        raise UsageError("--K must be positive")
    docs = tokenize_all(ingest(args.docs), _stoplist(args))
    vocab = build_vocabulary(docs, args.K)
    vocab.save(args.out)
    print(f"vocabulary: {vocab.K} words -> {args.out}")


def cmd_simulate_queries(args):
    cfg = _config(args)
    system = _system(args, cfg)
    tqs = transcribe_all(ingest(args.queries), system, cfg)
    write_transcribed(tqs, args.out)
    n_frag = sum(len(q.fragments()) for q in tqs)
    print(f"transcribed {len(tqs)} queries ({n_frag} fragments) -> {args.out}")


def cmd_search(args):
    cfg = _config(args)
    k = args.k if args.k is not None else cfg.N_final
    if k < 1:
        raise UsageError("--k must be positive")
    if args.text is not None:
        index = InvertedIndex.load(args.index)
        ranked = search(index, split_terms(args.text, _stoplist(args)), k, cfg.k1, cfg.b)
        sys.stdout.write(format_run([RunResult(args.qid, ranked, 1)], tag="search"))
        return
    if not args.completion:
        raise UsageError("--transcribed needs --completion")
    system = _system(args, cfg)
    cfg = cfg.with_(N_final=k)
    runs = []
    for tq in read_transcribed(args.transcribed):
        out = two_stage(tq, system.index, system.completion, cfg)
        for r in out.resolutions:
            choice = r.choice.surface if r.choice else "-"
            log.info("%s: /%s/ -> %s (%d candidates)", tq.query_id, " ".join(r.fragment.syllables),
                     choice, r.n_candidates)
        runs.append(out.run)
    sys.stdout.write(format_run(runs, tag="search"))


def cmd_experiment(args):
    cfg = _config(args)
    if args.method != 1 and not args.transcribed and not args.vocab:
        raise UsageError("methods 2-4 need --transcribed or --vocab to simulate queries")
    if args.method == 4 and not args.completion:
        raise UsageError("method 4 needs --completion")
    if args.method == 1 and not args.queries:
        raise UsageError("method 1 needs --queries")
    if not args.queries and not args.transcribed:
        raise UsageError("need --queries or --transcribed")
    system = _system(args, cfg)
    if args.method == 2 and system.vocab is None:
        raise UsageError("method 2 needs --vocab")
    queries = ingest(args.queries) if args.queries else []
    transcribed = read_transcribed(args.transcribed) if args.transcribed and args.method != 1 else None
    res = run_experiment(queries, system, args.method, cfg, transcribed)
    write_run(res.runs, args.out)
    print(f"method {args.method}: {len(res.runs)} queries -> {args.out}")
    if args.method in (3, 4):
        stats = args.oov_out or str(Path(args.out).with_suffix(".oov.jsonl"))
        with open(stats, "w", encoding="utf-8") as fh:
            for qid in sorted(res.per_query):
                c = res.per_query[qid]
                fh.write(json.dumps({"query_id": qid, "method": args.method, "detected": c.detected,
                                     "correct": c.correct, "completed": c.completed,
                                     "gold_total": c.gold_total}) + "\n")
        print(f"oov counts -> {stats}")
    if args.method == 4:
        n = len(res.completion_seconds)
        print(f"completion time: {res.ms_per_fragment:.3f} ms/fragment over {n} fragments "
              f"(kernel: {BACKEND})")


def _read_oov(path) -> OovCounts:
    total = OovCounts(0, 0, 0, 0)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                o = json.loads(line)
                total = total + OovCounts(int(o["detected"]), int(o["correct"]),
                                          int(o["completed"]), int(o["gold_total"]))
            except (ValueError, KeyError, TypeError) as e:
                raise EvaluationError(f"{path}: line {lineno}: bad oov record ({e})") from None
    return total


def _oov_rows(labels, counts, with_total):
    rows = list(zip(labels, counts))
    if with_total:
        total = OovCounts(0, 0, 0, 0)
        for c in counts:
            total = total + c
        rows.append(("Total", total))
    out = []
    for label, c in rows:
        try:
            r, p, a = oov_metrics(c)
        except EvaluationError:
            r = p = a = None
        out.append((label, c, r, p, a))
    return out


def cmd_eval(args):
    qrels = load_qrels(args.qrels)
    jsonl = []
    text = []
    for path in args.run:
        runs = {r.query_id: r for r in read_run(path)}
        qids = sorted(runs)
        if args.queries:
            qids = sorted(q.doc_id for q in ingest(args.queries))
        aps = {}
        for qid in qids:
            if qid not in qrels:
                raise EvaluationError(f"no qrels for query {qid}")
            aps[qid] = average_precision(runs[qid].ranked if qid in runs else RankedList(), qrels[qid])
        text.append(f"run {path}")
        width = max([len(q) for q in qids] + [8])
        for qid in qids:
            text.append(f"  {qid:<{width}}  {aps[qid]:.4f}")
            jsonl.append({"run": str(path), "query_id": qid, "ap": round(aps[qid], 6)})
        m = mean(aps.values())
        text.append(f"  {'mean AP':<{width}}  {m:.4f}")
        jsonl.append({"run": str(path), "mean_ap": round(m, 6), "queries": len(qids)})
    if args.oov:
        labels = args.label or [Path(p).name.split(".")[0] for p in args.oov]
        if len(labels) != len(args.oov):
            raise UsageError("--label must be given once per --oov file")
        rows = _oov_rows(labels, [_read_oov(p) for p in args.oov], args.total)
        lw = max(len(r[0]) for r in rows + [("label",)])
        text.append("")
        text.append(f"{'':<{lw}}  {'detected':>8} {'correct':>7} {'completed':>9} {'gold':>5}"
                    f"  {'recall':>6} {'precision':>9} {'accuracy':>8}")
        for label, c, r, p, a in rows:
            fmt = lambda v, w: f"{v:>{w}.3f}" if v is not None else f"{'n/a':>{w}}"
            text.append(f"{label:<{lw}}  {c.detected:>8} {c.correct:>7} {c.completed:>9} {c.gold_total:>5}"
                        f"  {fmt(r, 6)} {fmt(p, 9)} {fmt(a, 8)}")
            jsonl.append({"oov": label, "detected": c.detected, "correct": c.correct,
                          "completed": c.completed, "gold_total": c.gold_total,
                          "recall": None if r is None else round(r, 3),
                          "precision": None if p is None else round(p, 3),
                          "accuracy": None if a is None else round(a, 3)})
    lines = [json.dumps(o) for o in jsonl]
    if args.format in ("text", "both"):
        print("\n".join(text))
    if args.format in ("jsonl", "both"):
        if args.format == "both":
            print()
        print("\n".join(lines))
    if args.jsonl_out:
        Path(args.jsonl_out).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="openvocab", description="Open-vocabulary spoken-query retrieval.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    g = sub.add_parser("generate", help="write a synthetic collection, queries and qrels")
    g.add_argument("--out-dir", required=True)
    g.add_argument("--docs", type=int, default=500)
    g.add_argument("--topics", type=int, default=20)
    g.add_argument("--subtopics", type=int, default=5)
    g.add_argument("--queries", type=int, default=20)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("build-index", help="build the BM25 inverted index")
    b.add_argument("--docs", required=True)
    b.add_argument("--out", required=True)
    _add_common(b)
    b.set_defaults(func=cmd_build_index)

    c = sub.add_parser("build-completion-index", help="build the word/bigram syllable index")
    c.add_argument("--docs", required=True)
    c.add_argument("--out", required=True)
    _add_common(c, lexicon=True)
    c.set_defaults(func=cmd_build_completion_index)

    v = sub.add_parser("build-vocab", help="take the K most frequent words as the recognizer dictionary")
    v.add_argument("--docs", required=True)
    v.add_argument("--K", type=int, required=True)
    v.add_argument("--out", required=True)
    _add_common(v)
    v.set_defaults(func=cmd_build_vocab)

    s = sub.add_parser("simulate-queries", help="turn text queries into noisy transcriptions")
    s.add_argument("--queries", required=True)
    s.add_argument("--index", required=True, help="source of the syllable inventory")
    s.add_argument("--vocab", required=True)
    s.add_argument("--completion", help=argparse.SUPPRESS)
    s.add_argument("--out", required=True)
    _add_common(s, config=True, lexicon=True)
    s.set_defaults(func=cmd_simulate_queries)

    q = sub.add_parser("search", help="rank documents for a text or transcribed query")
    q.add_argument("--index", required=True)
    q.add_argument("--completion")
    q.add_argument("--vocab", help=argparse.SUPPRESS)
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--transcribed", help="transcribed-query file; runs two-stage search")
    q.add_argument("--qid", default="query")
    q.add_argument("--k", type=int)
    _add_common(q, config=True, lexicon=True)
    q.set_defaults(func=cmd_search)

    e = sub.add_parser("experiment", help="run one retrieval method over a query set")
    e.add_argument("--method", type=int, choices=METHODS, required=True)
    e.add_argument("--index", required=True)
    e.add_argument("--completion")
    e.add_argument("--vocab")
    e.add_argument("--queries")
    e.add_argument("--transcribed")
    e.add_argument("--out", required=True, help="run file")
    e.add_argument("--oov-out", help="per-query OOV counts (default: <out>.oov.jsonl)")
    _add_common(e, config=True, lexicon=True)
    e.set_defaults(func=cmd_experiment)

    ev = sub.add_parser("eval", help="average precision and OOV detection/completion metrics")
    ev.add_argument("--run", action="append", required=True)
    ev.add_argument("--qrels", required=True)
    ev.add_argument("--queries", help="evaluate every query in this file (missing runs score 0)")
    ev.add_argument("--oov", action="append", help="per-query OOV counts from experiment")
    ev.add_argument("--label", action="append", help="row label for each --oov file")
    ev.add_argument("--total", action="store_true", help="add a summed row (rows over disjoint query sets)")
    ev.add_argument("--format", choices=("text", "jsonl", "both"), default="both")
    ev.add_argument("--jsonl-out")
    ev.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except UsageError as e:
        print(f"openvocab {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, FormatError, EvaluationError, ValueError, KeyError, OSError) as e:
        print(f"openvocab {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
