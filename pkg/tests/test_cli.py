"""CLI surface: subcommands, exit codes, reports, determinism."""

import json
import socket
import threading
import time

import pytest
import requests

from panacea.cli import main

from _datagen import bigcn_separable_trees, nlisan_separable_dataset
from _toyworld import write_claims_file, write_documents_file, write_trees_file


def write_nlisan_training_file(path, n=10):
    with open(path, "w", encoding="utf-8") as fh:
        for claim, evidences, label in nlisan_separable_dataset(n=n, seed=0):
            fh.write(json.dumps({"claim": claim, "evidences": evidences,
                                 "label": "True" if label else "False"}) + "\n")


def write_bigcn_training_file(path, n=10, seed=0):
    with open(path, "w", encoding="utf-8") as fh:
        for tree, label in bigcn_separable_trees(n=n, seed=seed):
            nodes = [{"tweet_id": node.tweet_id, "parent_id": node.parent_id,
                      "user_id": node.user_id, "post_time": node.post_time,
                      "text": node.text} for node in tree.nodes.values()]
            fh.write(json.dumps({"tree_id": tree.tree_id,
                                 "label": "Rumour" if label else "NonRumour",
                                 "nodes": nodes}) + "\n")


class TestIngestCommand:
    def test_docs_and_report(self, tmp_path, capsys):
        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=4)
        report = tmp_path / "report.json"
        code = main(["ingest", "docs", str(docs),
                     "--data-dir", str(tmp_path / "data"), "--report", str(report)])
        assert code == 0
        out = capsys.readouterr().out
        assert "4 documents" in out
        assert json.loads(report.read_text())["documents"] == 4

    def test_missing_file_exit_2(self, tmp_path):
        code = main(["ingest", "docs", str(tmp_path / "missing.jsonl"),
                     "--data-dir", str(tmp_path / "data")])
        assert code == 2

    def test_malformed_exit_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"title": "no doc id", "body": "x"}\n')
        code = main(["ingest", "docs", str(bad), "--data-dir", str(tmp_path / "d")])
        assert code == 2

    def test_trees_min_size_reported(self, tmp_path, capsys):
        trees = tmp_path / "trees.jsonl"
        write_trees_file(trees, n_trees=6)
        code = main(["ingest", "trees", str(trees), "--min-size", "5",
                     "--data-dir", str(tmp_path / "data")])
        assert code == 0
        assert "accepted" in capsys.readouterr().out

    def test_usage_error_exit_1(self):
        assert main(["ingest", "bogus-kind", "whatever"]) == 1

    def test_rerun_reports_duplicates_without_duplicating(self, tmp_path, capsys):
        from panacea.corpus import CorpusStore

        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=3)
        data_dir = str(tmp_path / "data")
        assert main(["ingest", "docs", str(docs), "--data-dir", data_dir]) == 0
        capsys.readouterr()
        assert main(["ingest", "docs", str(docs), "--data-dir", data_dir]) == 2
        assert "duplicate" in capsys.readouterr().err
        assert len(CorpusStore(data_dir).documents) == 3  # nothing duplicated


class TestIndexCommand:
    def test_build_then_stats(self, tmp_path, capsys):
        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=6)
        data_dir = str(tmp_path / "data")
        assert main(["ingest", "docs", str(docs), "--data-dir", data_dir]) == 0
        assert main(["index", "build", "--data-dir", data_dir]) == 0
        build_out = capsys.readouterr().out
        assert main(["index", "stats", "--data-dir", data_dir]) == 0
        stats_out = capsys.readouterr().out
        n_paragraphs = int(build_out.split("N=")[1].split()[0].rstrip(";"))
        assert f"N={n_paragraphs}" in stats_out

    def test_rebuild_idempotent(self, tmp_path):
        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=5)
        data_dir = str(tmp_path / "data")
        main(["ingest", "docs", str(docs), "--data-dir", data_dir])
        assert main(["index", "build", "--data-dir", data_dir]) == 0
        first = (tmp_path / "data" / "index_paragraphs.json").read_bytes()
        assert main(["index", "build", "--data-dir", data_dir]) == 0
        assert (tmp_path / "data" / "index_paragraphs.json").read_bytes() == first

    def test_empty_corpus_exit_2(self, tmp_path):
        assert main(["index", "build", "--data-dir", str(tmp_path / "empty")]) == 2


class TestSearchCommand:
    def test_search_returns_ranked_hits(self, tmp_path, capsys):
        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=8)
        data_dir = str(tmp_path / "data")
        main(["ingest", "docs", str(docs), "--data-dir", data_dir])
        report = tmp_path / "hits.json"
        code = main(["search", "--query", "vitamin c cures coronavirus",
                     "--data-dir", data_dir, "--report", str(report)])
        assert code == 0
        hits = json.loads(report.read_text())["hits"]
        assert hits
        scores = [h["score"] for h in hits]
        assert scores == sorted(scores, reverse=True)

    def test_search_empty_store_exit_2(self, tmp_path):
        assert main(["search", "--query", "anything",
                     "--data-dir", str(tmp_path / "nothing")]) == 2


class TestTrainCommand:
    def test_nlisan_train_writes_checkpoint(self, tmp_path, capsys):
        data = tmp_path / "train.jsonl"
        write_nlisan_training_file(data)
        out = tmp_path / "model.ckpt"
        code = main(["train", "nlisan", "--data", str(data), "--epochs", "5",
                     "--out", str(out), "--seed", "3"])
        assert code == 0
        assert out.exists()
        assert "final loss" in capsys.readouterr().out

    def test_deterministic_checkpoints(self, tmp_path):
        data = tmp_path / "train.jsonl"
        write_nlisan_training_file(data)
        outs = []
        for run in range(2):
            out = tmp_path / f"m{run}.ckpt"
            assert main(["train", "nlisan", "--data", str(data), "--epochs", "3",
                         "--out", str(out), "--seed", "11"]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_gradcheck_flag(self, tmp_path, capsys):
        data = tmp_path / "train.jsonl"
        write_nlisan_training_file(data, n=4)
        report = tmp_path / "train_report.json"
        code = main(["train", "nlisan", "--data", str(data), "--epochs", "2",
                     "--out", str(tmp_path / "m.ckpt"), "--gradcheck",
                     "--report", str(report)])
        assert code == 0
        assert "gradcheck" in capsys.readouterr().out
        assert json.loads(report.read_text())["gradcheck_max_rel_err"] < 1e-4

    def test_bigcn_train_and_warm_start(self, tmp_path):
        data = tmp_path / "trees_train.jsonl"
        write_bigcn_training_file(data)
        first = tmp_path / "bigcn.ckpt"
        assert main(["train", "bigcn", "--data", str(data), "--epochs", "3",
                     "--out", str(first), "--dim", "24"]) == 0
        tuned = tmp_path / "tuned.ckpt"
        assert main(["train", "bigcn", "--data", str(data), "--epochs", "2",
                     "--out", str(tuned), "--from", str(first), "--dim", "24"]) == 0
        assert tuned.exists()

    def test_empty_training_file_exit_2(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert main(["train", "nlisan", "--data", str(empty),
                     "--out", str(tmp_path / "m.ckpt")]) == 2


class TestEvalCommand:
    def test_retrieval_perfect_toy_judgments(self, tmp_path, capsys):
        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=10)
        data_dir = str(tmp_path / "data")
        main(["ingest", "docs", str(docs), "--data-dir", data_dir])

        from panacea.corpus import CorpusStore
        from panacea.retrieval import build_index, bm25_search
        from panacea.service.engine import paragraph_units

        store = CorpusStore(data_dir)
        index = build_index(paragraph_units(store))
        judged = tmp_path / "judged.jsonl"
        with judged.open("w") as fh:
            for para_id in sorted(store.paragraphs)[:3]:
                text = store.paragraphs[para_id].text
                top = bm25_search(index, text, 1)[0][0]
                fh.write(json.dumps({"query": text, "relevant": [top]}) + "\n")

        report = tmp_path / "ap.json"
        code = main(["eval", "retrieval", "--data-dir", data_dir,
                     "--judged", str(judged), "--report", str(report)])
        assert code == 0
        payload = json.loads(report.read_text())
        assert all(v == 1.0 for v in payload["ap"].values())
        assert "AP@5=1.0000" in capsys.readouterr().out

    def test_eval_requires_judged(self, tmp_path):
        assert main(["eval", "retrieval", "--data-dir", str(tmp_path)]) == 1

    def test_rumour_eval_report_schema(self, tmp_path):
        train_file = tmp_path / "train.jsonl"
        write_bigcn_training_file(train_file, n=12)
        ckpt = tmp_path / "b.ckpt"
        main(["train", "bigcn", "--data", str(train_file), "--epochs", "10",
              "--lr", "0.01", "--out", str(ckpt), "--dim", "24"])
        report = tmp_path / "eval.json"
        code = main(["eval", "rumour", "--model", str(ckpt),
                     "--data", str(train_file), "--train-name", "toyA",
                     "--test-name", "toyA", "--report", str(report)])
        assert code == 0
        payload = json.loads(report.read_text())
        assert set(payload) >= {"train_set", "test_set", "accuracy", "per_class"}
        assert payload["train_set"] == "toyA"
        for cls in payload["per_class"].values():
            assert set(cls) == {"precision", "recall"}


class TestPrecomputeAndServe:
    def test_precompute_counts(self, tmp_path, capsys):
        docs = tmp_path / "docs.jsonl"
        claims = tmp_path / "claims.jsonl"
        write_documents_file(docs, n_docs=8)
        write_claims_file(claims)
        data_dir = str(tmp_path / "data")
        main(["ingest", "docs", str(docs), "--data-dir", data_dir])
        main(["ingest", "claims", str(claims), "--data-dir", data_dir])
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"data_dir": data_dir, "encoder_dim": 64,
                                      "lda_iters": 20}))
        code = main(["precompute", "--config", str(config)])
        assert code == 0
        assert "5 precomputed" in capsys.readouterr().out

    def test_serve_health_probe(self, tmp_path):
        docs = tmp_path / "docs.jsonl"
        write_documents_file(docs, n_docs=5)
        data_dir = str(tmp_path / "data")
        main(["ingest", "docs", str(docs), "--data-dir", data_dir])
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"data_dir": data_dir, "host": "127.0.0.1",
                                      "port": port, "encoder_dim": 64}))
        thread = threading.Thread(target=main, args=(["serve", "--config", str(config)],),
                                  daemon=True)
        thread.start()
        deadline = time.time() + 10
        status = None
        while time.time() < deadline:
            try:
                status = requests.get(f"http://127.0.0.1:{port}/api/health",
                                      timeout=1).status_code
                break
            except requests.ConnectionError:
                time.sleep(0.1)
        assert status == 200

    def test_serve_busy_port_exit_3(self, tmp_path):
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            config = tmp_path / "config.json"
            config.write_text(json.dumps({"data_dir": str(tmp_path / "d"),
                                          "host": "127.0.0.1", "port": port}))
            assert main(["serve", "--config", str(config)]) == 3
        finally:
            blocker.close()

    def test_bad_config_exit_1(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"no_such_key": 1}))
        assert main(["precompute", "--config", str(config)]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["precompute", "--config", str(tmp_path / "nope.json")]) == 1
