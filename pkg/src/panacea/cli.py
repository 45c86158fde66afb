"""Operator command line: ingest, index, train, eval, precompute, serve.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 runtime error.
Every command prints a human-readable summary; --report writes the same
result as JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .corpus import ClaimLabel, CorpusStore, PropagationTree, RumourLabel, TweetNode
from .errors import (
    BadCheckpoint,
    BadConfig,
    DuplicateId,
    EmptyCorpus,
    EmptyDataset,
    MalformedRecord,
    NoQueries,
    OrphanNode,
    PanaceaError,
)
from .retrieval import (
    CosineReranker,
    HashedTfidfEncoder,
    InvertedIndex,
    bm25_search,
    build_index,
    evaluate_pipeline,
    load_judged,
)
from .service import ServiceConfig, api_serve, build_engine, load_config
from .service.engine import PARAGRAPH_INDEX_FILE, TREE_INDEX_FILE, build_indexes
from .service.jobs import JobService

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

DATA_ERRORS = (MalformedRecord, DuplicateId, OrphanNode, EmptyCorpus,
               EmptyDataset, NoQueries, BadCheckpoint, FileNotFoundError)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_report(path: str | None, payload: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False),
                              encoding="utf-8")


def _config_from_args(args) -> ServiceConfig:
    overrides = {}
    for key in ("data_dir", "host", "port", "slots"):
        if getattr(args, key.replace("-", "_"), None) is not None:
            overrides[key] = getattr(args, key.replace("-", "_"))
    return load_config(getattr(args, "config", None), overrides)


# --- ingest ------------------------------------------------------------------

def cmd_ingest(args) -> int:
    store = CorpusStore(args.data_dir)
    if args.kind == "docs":
        docs, paras = store.ingest_documents(args.path)
        summary = f"{docs} documents, {paras} paragraphs"
        payload = {"documents": docs, "paragraphs": paras}
    elif args.kind == "claims":
        count = store.ingest_claims(args.path)
        summary = f"{count} claims"
        payload = {"claims": count, "histogram": store.claim_label_histogram()}
    else:
        accepted, rejected = store.ingest_trees(args.path, min_size=args.min_size)
        summary = f"{accepted} trees accepted, {rejected} rejected"
        payload = {"accepted": accepted, "rejected": rejected}
    print(summary)
    _write_report(args.report, payload)
    return EXIT_OK


# --- index --------------------------------------------------------------------

def cmd_index(args) -> int:
    store = CorpusStore(args.data_dir)
    if args.action == "build":
        para_index, tree_index = build_indexes(store, persist=True)
        if para_index is None and tree_index is None:
            print("nothing to index", file=sys.stderr)
            return EXIT_DATA
        parts = []
        payload = {}
        if para_index:
            parts.append(f"paragraphs: N={para_index.N}")
            payload["paragraphs"] = {"N": para_index.N,
                                     "avg_doc_length": para_index.avg_doc_length}
        if tree_index:
            parts.append(f"trees: N={tree_index.N}")
            payload["trees"] = {"N": tree_index.N,
                                "avg_doc_length": tree_index.avg_doc_length}
        print("; ".join(parts))
        _write_report(args.report, payload)
        return EXIT_OK
    # stats
    payload = {}
    for name, filename in (("paragraphs", PARAGRAPH_INDEX_FILE),
                           ("trees", TREE_INDEX_FILE)):
        path = Path(args.data_dir) / filename
        if path.exists():
            index = InvertedIndex.load(path)
            payload[name] = {"N": index.N, "avg_doc_length": index.avg_doc_length,
                             "terms": len(index.postings)}
            print(f"{name}: N={index.N} avg_len={index.avg_doc_length:.2f} "
                  f"terms={len(index.postings)}")
    if not payload:
        print("no index built", file=sys.stderr)
        return EXIT_DATA
    _write_report(args.report, payload)
    return EXIT_OK


# --- search -----------------------------------------------------------------------

def cmd_search(args) -> int:
    filename = PARAGRAPH_INDEX_FILE if args.index == "paragraphs" else TREE_INDEX_FILE
    path = Path(args.data_dir) / filename
    if path.exists():
        index = InvertedIndex.load(path)
    else:
        store = CorpusStore(args.data_dir)
        from .service.engine import paragraph_units, tree_units

        units = paragraph_units(store) if args.index == "paragraphs" else tree_units(store)
        if not units:
            print("nothing indexed; run ingest first", file=sys.stderr)
            return EXIT_DATA
        kind = "Paragraph" if args.index == "paragraphs" else "TreeText"
        index = build_index(units, kind=kind)
    hits = bm25_search(index, args.query, args.k)
    for rank, (unit_id, score) in enumerate(hits, start=1):
        text = index.units[unit_id].text
        preview = text if len(text) <= 100 else text[:97] + "..."
        print(f"{rank:2d}. {unit_id}  {score:.4f}  {preview}")
    if not hits:
        print("no matches")
    _write_report(args.report, {"query": args.query,
                                "hits": [{"unit_id": u, "score": s} for u, s in hits]})
    return EXIT_OK


# --- train ----------------------------------------------------------------------

def _load_nlisan_data(path: str) -> list:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                rows.append((rec["claim"], rec["evidences"], rec["label"]))
            except (json.JSONDecodeError, KeyError) as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
    return rows


def _load_bigcn_data(path: str) -> list[tuple[PropagationTree, int]]:
    labels = {"NonRumour": 0, "Rumour": 1}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                nodes = {}
                for node in rec["nodes"]:
                    nodes[node["tweet_id"]] = TweetNode(
                        tweet_id=node["tweet_id"], parent_id=node.get("parent_id"),
                        user_id=node.get("user_id", ""),
                        post_time=node.get("post_time", ""),
                        text=node.get("text", ""),
                        retweet_count=int(node.get("retweet_count", 0)))
                tree = PropagationTree(tree_id=rec.get("tree_id", f"t{line_no}"),
                                       nodes=nodes)
                rows.append((tree, labels[rec["label"]]))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
    return rows


def cmd_train(args) -> int:
    from . import nlisan as nlisan_mod
    from . import rumournet

    encoder = HashedTfidfEncoder(dim=args.dim)
    if args.model == "nlisan":
        data = _load_nlisan_data(args.data)
        if not data:
            raise EmptyDataset("training file holds no rows")
        if getattr(args, "warm_start", None):
            params = nlisan_mod.NlisanParams.load(args.warm_start)
        else:
            params = nlisan_mod.NlisanParams.init(d=args.dim, seed=args.seed)
        params, curve = nlisan_mod.train(params, data, encoder,
                                         epochs=args.epochs, lr=args.lr,
                                         seed=args.seed)
        if not np.isfinite(curve[-1]):
            print("training diverged: loss is not finite", file=sys.stderr)
            return EXIT_RUNTIME
        acc = nlisan_mod.accuracy(params, data, encoder)
        payload = {"model": "nlisan", "final_loss": curve[-1], "train_accuracy": acc,
                   "epochs": args.epochs}
        if args.gradcheck:
            S, I, mask = nlisan_mod.assemble_inputs(
                data[0][0], data[0][1], encoder, n_slots=params.N)
            err = nlisan_mod.check_gradients(params, S, I, mask, label_idx=1)
            payload["gradcheck_max_rel_err"] = err
            print(f"gradcheck max relative error: {err:.2e}")
        params.save(args.out, binary=args.binary)
        print(f"final loss {curve[-1]:.6f}, train accuracy {acc:.3f}, "
              f"checkpoint {args.out}")
    else:
        labelled = _load_bigcn_data(args.data)
        if not labelled:
            raise EmptyDataset("training file holds no rows")
        dataset = rumournet.prepare_dataset(labelled, encoder)
        if getattr(args, "warm_start", None):
            params = rumournet.BigcnParams.load(args.warm_start)
        else:
            params = rumournet.BigcnParams.init(d=args.dim, seed=args.seed)
        params, curve = rumournet.train_bigcn(params, dataset, epochs=args.epochs,
                                              lr=args.lr, seed=args.seed)
        if not np.isfinite(curve[-1]):
            print("training diverged: loss is not finite", file=sys.stderr)
            return EXIT_RUNTIME
        report = rumournet.evaluate_cross_dataset(params, dataset, "train", "train")
        payload = {"model": "bigcn", "final_loss": curve[-1],
                   "train_accuracy": report["accuracy"], "epochs": args.epochs}
        if args.gradcheck:
            from .mlcore import gradient_check

            graph, label_idx = dataset[0]

            def loss_fn(arrays):
                return rumournet.loss_and_grads(params, graph, label_idx)

            err = gradient_check(loss_fn, params.arrays(), n_coords=100)
            payload["gradcheck_max_rel_err"] = err
            print(f"gradcheck max relative error: {err:.2e}")
        params.save(args.out, binary=args.binary)
        print(f"final loss {curve[-1]:.6f}, train accuracy "
              f"{report['accuracy']:.3f}, checkpoint {args.out}")
    _write_report(args.report, payload)
    return EXIT_OK


# --- eval ------------------------------------------------------------------------

def cmd_eval(args) -> int:
    if args.task == "retrieval":
        store = CorpusStore(args.data_dir)
        from .service.engine import paragraph_units

        units = paragraph_units(store)
        if not units:
            print("no paragraphs ingested", file=sys.stderr)
            return EXIT_DATA
        index = build_index(units, kind="Paragraph")
        queries = load_judged(args.judged)

        if args.pipeline == "bm25":
            def search(query, k):
                return [uid for uid, _ in bm25_search(index, query, k)]
        else:
            encoder = HashedTfidfEncoder(index=index)
            reranker = CosineReranker(encoder)

            def search(query, k):
                stage1 = bm25_search(index, query, max(k, 100))
                rescored = sorted(
                    ((reranker.score(query, index.units[uid].text), uid)
                     for uid, _ in stage1), key=lambda p: (-p[0], p[1]))
                return [uid for _, uid in rescored[:k]]

        table = evaluate_pipeline(queries, search)
        payload = {"pipeline": args.pipeline,
                   "ap": {str(k): v for k, v in table.items()},
                   "queries": len(queries)}
        print("  ".join(f"AP@{k}={v:.4f}" for k, v in sorted(table.items())))
    else:
        from . import rumournet

        params = rumournet.BigcnParams.load(args.model)
        labelled = _load_bigcn_data(args.data)
        if not labelled:
            raise EmptyDataset("evaluation file holds no rows")
        encoder = HashedTfidfEncoder(dim=params.d)
        dataset = rumournet.prepare_dataset(labelled, encoder)
        payload = rumournet.evaluate_cross_dataset(
            params, dataset, train_set=args.train_name, test_set=args.test_name)
        payload["per_class"] = {str(k): v for k, v in payload["per_class"].items()}
        print(f"train={payload['train_set']} test={payload['test_set']} "
              f"accuracy={payload['accuracy']:.3f}")
        for cls, pr in payload["per_class"].items():
            print(f"  class {cls}: precision={pr['precision']:.3f} "
                  f"recall={pr['recall']:.3f}")
        if args.report:  # evaluation reports are line-record files
            Path(args.report).write_text(
                json.dumps(payload, ensure_ascii=False) + "\n", encoding="utf-8")
        return EXIT_OK
    _write_report(args.report, payload)
    return EXIT_OK


# --- precompute / serve -------------------------------------------------------------

def cmd_precompute(args) -> int:
    config = _config_from_args(args)
    engine = build_engine(config)
    service = JobService(engine, slots=config.slots, ttl_seconds=config.ttl_seconds,
                         queue_bound=config.queue_bound, data_dir=config.data_dir)
    report = service.precompute_all(engine.store.claims.values())
    print(f"{report['claims']} precomputed, {len(report['failed'])} failed")
    _write_report(args.report, report)
    return EXIT_OK if not report["failed"] else EXIT_RUNTIME


def cmd_serve(args) -> int:
    config = _config_from_args(args)
    try:
        api_serve(config)
    except OSError as exc:
        print(f"cannot bind {config.host}:{config.port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


# --- wiring -----------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="panacea",
                     description="fact-checking and rumour-detection toolkit")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_ingest = sub.add_parser("ingest", help="load documents, claims, or trees")
    p_ingest.add_argument("kind", choices=["docs", "claims", "trees"])
    p_ingest.add_argument("path")
    p_ingest.add_argument("--data-dir", default="data")
    p_ingest.add_argument("--min-size", type=int, default=5)
    p_ingest.add_argument("--report")
    p_ingest.set_defaults(func=cmd_ingest)

    p_index = sub.add_parser("index", help="build or inspect the search indexes")
    p_index.add_argument("action", choices=["build", "stats"])
    p_index.add_argument("--data-dir", default="data")
    p_index.add_argument("--report")
    p_index.set_defaults(func=cmd_index)

    p_search = sub.add_parser("search", help="BM25 query against an index")
    p_search.add_argument("--query", required=True)
    p_search.add_argument("--data-dir", default="data")
    p_search.add_argument("--index", choices=["paragraphs", "trees"],
                          default="paragraphs")
    p_search.add_argument("-k", type=int, default=10)
    p_search.add_argument("--report")
    p_search.set_defaults(func=cmd_search)

    p_train = sub.add_parser("train", help="train a classifier")
    p_train.add_argument("model", choices=["nlisan", "bigcn"])
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--epochs", type=int, default=100)
    p_train.add_argument("--lr", type=float, default=1e-3)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--dim", type=int, default=64)
    p_train.add_argument("--out", default="model.ckpt")
    p_train.add_argument("--from", dest="warm_start",
                         help="warm-start checkpoint (fine-tune)")
    p_train.add_argument("--gradcheck", action="store_true")
    p_train.add_argument("--binary", action="store_true",
                         help="binary float64 checkpoint instead of text")
    p_train.add_argument("--report")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate retrieval or the rumour model")
    p_eval.add_argument("task", choices=["retrieval", "rumour"])
    p_eval.add_argument("--data-dir", default="data")
    p_eval.add_argument("--judged", help="judged-queries file (retrieval)")
    p_eval.add_argument("--pipeline", choices=["bm25", "rerank"], default="bm25")
    p_eval.add_argument("--model", help="bigcn checkpoint (rumour)")
    p_eval.add_argument("--data", help="labelled trees file (rumour)")
    p_eval.add_argument("--train-name", default="train")
    p_eval.add_argument("--test-name", default="test")
    p_eval.add_argument("--report")
    p_eval.set_defaults(func=cmd_eval)

    p_pre = sub.add_parser("precompute", help="precompute results for dataset claims")
    p_pre.add_argument("--config")
    p_pre.add_argument("--data-dir")
    p_pre.add_argument("--report")
    p_pre.set_defaults(func=cmd_precompute)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--config")
    p_serve.add_argument("--data-dir")
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--slots", type=int)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "eval":
            if args.task == "retrieval" and not args.judged:
                parser.error("eval retrieval requires --judged")
            if args.task == "rumour" and not (args.model and args.data):
                parser.error("eval rumour requires --model and --data")
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except BadConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PanaceaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
