"""HTTP contract tests against a live threaded server on an ephemeral port."""

import time

import pytest
import requests

from panacea.service import JobService, PanaceaServer, ServiceConfig
from panacea.service.httpd import serve_in_thread

from _toyworld import build_toy_engine


@pytest.fixture(scope="module")
def api(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("api")
    engine = build_toy_engine(tmp / "data", tmp, n_docs=20, n_trees=10)
    config = ServiceConfig(data_dir=str(tmp / "data"), host="127.0.0.1", port=0,
                           slots=1, admin_token="secret-token")
    server, thread = serve_in_thread(config, engine)
    host, port = server.server_address
    base = f"http://{host}:{port}"
    yield base, server
    server.shutdown()
    server.service.stop()
    server.server_close()


def wait_for_done(base, kind, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = requests.get(f"{base}/api/{kind}/{job_id}").json()
        if doc["state"] in ("Done", "Failed"):
            return doc
        time.sleep(0.1)
    raise TimeoutError(f"job {job_id} did not finish")


class TestHealthAndAutocomplete:
    def test_health(self, api):
        base, _ = api
        resp = requests.get(f"{base}/api/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_autocomplete_prefix_match(self, api):
        base, _ = api
        resp = requests.get(f"{base}/api/autocomplete", params={"q": "vita"})
        assert resp.status_code == 200
        suggestions = resp.json()["suggestions"]
        assert suggestions
        assert suggestions[0]["text"] == "vitamin c cures coronavirus"

    def test_autocomplete_empty_query(self, api):
        base, _ = api
        resp = requests.get(f"{base}/api/autocomplete", params={"q": ""})
        assert resp.json()["suggestions"] == []

    def test_autocomplete_no_match(self, api):
        base, _ = api
        resp = requests.get(f"{base}/api/autocomplete", params={"q": "zzzqqq"})
        assert resp.json()["suggestions"] == []

    def test_autocomplete_contains_band_after_prefix_band(self, api):
        base, _ = api
        resp = requests.get(f"{base}/api/autocomplete", params={"q": "coronavirus"})
        texts = [s["text"] for s in resp.json()["suggestions"]]
        assert "coronavirus is genetically engineered" in texts
        assert "vitamin c cures coronavirus" in texts
        assert texts.index("coronavirus is genetically engineered") < \
            texts.index("vitamin c cures coronavirus")


class TestJobEndpoints:
    def test_factcheck_roundtrip(self, api):
        base, _ = api
        resp = requests.post(f"{base}/api/factcheck",
                             json={"claim": "masks cause oxygen deficiency"},
                             headers={"X-Client-Id": "tester-1"})
        assert resp.status_code == 200
        job_id = resp.json()["job_id"]
        doc = wait_for_done(base, "factcheck", job_id)
        assert doc["state"] == "Done"
        assert doc["result"]["documents"]
        assert doc["result"]["verdict"] in ("True", "False")
        for record in doc["result"]["documents"]:
            assert set(record) >= {"unit_id", "text", "relevance", "stance",
                                   "stance_triplet", "source", "doc_type", "kind"}

    def test_rumour_roundtrip_with_panels(self, api):
        base, _ = api
        resp = requests.post(f"{base}/api/rumour",
                             json={"claim": "vitamin c cures coronavirus"},
                             headers={"X-Client-Id": "tester-2"})
        job_id = resp.json()["job_id"]
        doc = wait_for_done(base, "rumour", job_id)
        assert doc["state"] == "Done"
        panels = doc["result"]["panels"]
        assert set(panels) == {"tweet_count", "word_cloud", "topics", "spread",
                               "propagation", "map"}
        assert doc["result"]["aggregate_score"] is not None

    def test_empty_claim_is_400(self, api):
        base, _ = api
        resp = requests.post(f"{base}/api/factcheck", json={"claim": "  "})
        assert resp.status_code == 400

    def test_malformed_body_is_400(self, api):
        base, _ = api
        resp = requests.post(f"{base}/api/factcheck", data=b"not json at all",
                             headers={"Content-Type": "application/json"})
        assert resp.status_code == 400

    def test_unknown_job_is_404(self, api):
        base, _ = api
        assert requests.get(f"{base}/api/factcheck/deadbeef").status_code == 404

    def test_unknown_route_is_404(self, api):
        base, _ = api
        assert requests.get(f"{base}/api/nothing/here").status_code == 404

    def test_kind_mismatch_is_404(self, api):
        base, _ = api
        resp = requests.post(f"{base}/api/factcheck",
                             json={"claim": "hand washing prevents infection"},
                             headers={"X-Client-Id": "tester-3"})
        job_id = resp.json()["job_id"]
        wait_for_done(base, "factcheck", job_id)
        assert requests.get(f"{base}/api/rumour/{job_id}").status_code == 404


class TestResourceEndpoints:
    def test_get_claim(self, api):
        base, _ = api
        resp = requests.get(f"{base}/api/claims/c-vitamin")
        assert resp.status_code == 200
        assert resp.json()["text"] == "vitamin c cures coronavirus"

    def test_get_claim_404(self, api):
        base, _ = api
        assert requests.get(f"{base}/api/claims/zzz").status_code == 404

    def test_get_tree(self, api):
        base, server = api
        tree_id = sorted(server.engine.store.trees)[0]
        resp = requests.get(f"{base}/api/trees/{tree_id}")
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["tree_id"] == tree_id
        assert doc["size"] == len(doc["nodes"])
        assert doc["nodes"][0]["depth"] == 0

    def test_admin_ingest_requires_token(self, api, tmp_path):
        base, _ = api
        resp = requests.post(f"{base}/api/admin/ingest",
                             json={"kind": "docs", "path": str(tmp_path / "x.jsonl")})
        assert resp.status_code == 403

    def test_admin_ingest_bad_path_is_400(self, api, tmp_path):
        base, _ = api
        resp = requests.post(f"{base}/api/admin/ingest",
                             json={"kind": "docs", "path": str(tmp_path / "nope.jsonl")},
                             headers={"X-Admin-Token": "secret-token"})
        assert resp.status_code == 400


class TestStaticUi:
    def test_ui_bundle_served_when_configured(self, tmp_path):
        ui_dir = tmp_path / "dist"
        ui_dir.mkdir()
        (ui_dir / "index.html").write_text("<!doctype html><title>panacea</title>")
        (ui_dir / "app.js").write_text("console.log('ui');")
        engine = build_toy_engine(tmp_path / "data", tmp_path, n_docs=5, n_trees=5)
        config = ServiceConfig(data_dir=str(tmp_path / "data"), host="127.0.0.1",
                               port=0, ui_dir=str(ui_dir))
        server, _ = serve_in_thread(config, engine)
        host, port = server.server_address
        base = f"http://{host}:{port}"
        try:
            index = requests.get(f"{base}/ui/")
            assert index.status_code == 200
            assert "panacea" in index.text
            js = requests.get(f"{base}/ui/app.js")
            assert js.status_code == 200
            assert "javascript" in js.headers["Content-Type"]
            assert requests.get(f"{base}/ui/missing.js").status_code == 404
            # path traversal is rejected
            assert requests.get(f"{base}/ui/%2e%2e/secret").status_code == 404
        finally:
            server.shutdown()
            server.service.stop()
            server.server_close()

    def test_ui_404_when_not_configured(self, api):
        base, _ = api
        assert requests.get(f"{base}/ui/").status_code == 404


class TestConfigEnvVar:
    def test_panacea_config_env_is_honoured(self, tmp_path, monkeypatch):
        import json as json_mod

        from panacea.service import CONFIG_ENV_VAR, load_config

        cfg = tmp_path / "cfg.json"
        cfg.write_text(json_mod.dumps({"slots": 3, "ttl_seconds": 12.5}))
        monkeypatch.setenv(CONFIG_ENV_VAR, str(cfg))
        loaded = load_config()
        assert loaded.slots == 3
        assert loaded.ttl_seconds == 12.5

    def test_flag_overrides_beat_file(self, tmp_path, monkeypatch):
        import json as json_mod

        from panacea.service import CONFIG_ENV_VAR, load_config

        cfg = tmp_path / "cfg.json"
        cfg.write_text(json_mod.dumps({"slots": 3}))
        monkeypatch.setenv(CONFIG_ENV_VAR, str(cfg))
        assert load_config(overrides={"slots": 7}).slots == 7


class TestQueueFullOver503:
    def test_503_when_queue_bounded(self, tmp_path):
        class SlowEngine:
            def run(self, kind, claim_text):
                time.sleep(0.5)
                return {"status": "ok"}

        config = ServiceConfig(data_dir=str(tmp_path / "d"), host="127.0.0.1",
                               port=0, slots=1, queue_bound=2)
        engine = build_toy_engine(tmp_path / "d", tmp_path, n_docs=6, n_trees=5)
        server, _ = serve_in_thread(config, engine)
        # swap in a slow engine for the job workers
        server.service.engine = SlowEngine()
        host, port = server.server_address
        base = f"http://{host}:{port}"
        try:
            requests.post(f"{base}/api/factcheck", json={"claim": "one"})
            time.sleep(0.1)
            requests.post(f"{base}/api/factcheck", json={"claim": "two"})
            requests.post(f"{base}/api/factcheck", json={"claim": "three"})
            resp = requests.post(f"{base}/api/factcheck", json={"claim": "four"})
            assert resp.status_code == 503
        finally:
            server.shutdown()
            server.service.stop()
            server.server_close()
