import json

import pytest
from fastapi.testclient import TestClient

from titlegen.generation import GeneratorSpec
from titlegen.service import ServiceConfig, create_app


@pytest.fixture()
def lead_client():
    with TestClient(create_app(ServiceConfig())) as client:
        yield client


def _remote_config(endpoint, timeout=10.0, **kwargs):
    return ServiceConfig(
        generator=GeneratorSpec(kind="remote", endpoint=endpoint, timeout=timeout), **kwargs
    )


class TestSuggest:
    def test_lead_round_trip(self, lead_client):
        resp = lead_client.post(
            "/api/v1/suggest",
            json={"description": "The app crashes when I click save. Steps: ..."},
        )
        assert resp.status_code == 200
        assert resp.json() == {"title": "The app crashes when I click save", "generator": "lead"}

    def test_title_is_single_line_and_capped(self, lead_client):
        long_line = " ".join(f"word{i}" for i in range(40))
        resp = lead_client.post("/api/v1/suggest", json={"description": long_line})
        title = resp.json()["title"]
        assert "\n" not in title
        assert len(title.split()) <= 15

    def test_whitespace_only_description_400(self, lead_client):
        resp = lead_client.post("/api/v1/suggest", json={"description": "   "})
        assert resp.status_code == 400

    def test_missing_description_field_400(self, lead_client):
        assert lead_client.post("/api/v1/suggest", json={"text": "x"}).status_code == 400

    def test_non_string_description_400(self, lead_client):
        assert lead_client.post("/api/v1/suggest", json={"description": 42}).status_code == 400

    def test_malformed_json_400(self, lead_client):
        resp = lead_client.post(
            "/api/v1/suggest",
            content=b"{broken",
            headers={"Content-Type": "application/json"},
        )
        assert resp.status_code == 400

    def test_wrong_content_type_400(self, lead_client):
        resp = lead_client.post(
            "/api/v1/suggest",
            content=b"description=x",
            headers={"Content-Type": "application/x-www-form-urlencoded"},
        )
        assert resp.status_code == 400

    def test_oversize_body_413(self, lead_client):
        huge = json.dumps({"description": "x" * (1024 * 1024)})
        resp = lead_client.post(
            "/api/v1/suggest", content=huge, headers={"Content-Type": "application/json"}
        )
        assert resp.status_code == 413

    def test_unknown_route_404(self, lead_client):
        assert lead_client.get("/api/v1/nothing").status_code == 404

    def test_remote_upstream_500_maps_to_502(self, stub_server):
        with TestClient(create_app(_remote_config(f"{stub_server}/fail"))) as client:
            resp = client.post("/api/v1/suggest", json={"description": "x"})
        assert resp.status_code == 502

    def test_remote_timeout_maps_to_504(self, stub_server):
        with TestClient(create_app(_remote_config(f"{stub_server}/slow", timeout=0.2))) as client:
            resp = client.post("/api/v1/suggest", json={"description": "x"})
        assert resp.status_code == 504

    def test_remote_pass_through(self, stub_server):
        with TestClient(create_app(_remote_config(f"{stub_server}/title"))) as client:
            resp = client.post("/api/v1/suggest", json={"description": "x"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["title"] == "fix crash"
        assert body["generator"].startswith("remote:")

    def test_identical_requests_identical_bodies(self, lead_client):
        payload = {"description": "Deterministic body. More text."}
        bodies = {lead_client.post("/api/v1/suggest", json=payload).content for _ in range(10)}
        assert len(bodies) == 1


class TestHealth:
    def test_get(self, lead_client):
        resp = lead_client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "generator": "lead"}

    def test_ok_even_when_remote_endpoint_down(self):
        cfg = _remote_config("http://127.0.0.1:1/suggest")
        with TestClient(create_app(cfg)) as client:
            resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_head_empty_body(self, lead_client):
        resp = lead_client.head("/health")
        assert resp.status_code == 200
        assert resp.content == b""


class TestCors:
    def test_allowed_origin_granted(self):
        cfg = ServiceConfig(cors_allowed_origins=("https://tracker.example",))
        with TestClient(create_app(cfg)) as client:
            resp = client.post(
                "/api/v1/suggest",
                json={"description": "Crash on save."},
                headers={"Origin": "https://tracker.example"},
            )
        assert resp.headers.get("access-control-allow-origin") == "https://tracker.example"

    def test_disallowed_origin_gets_no_grant(self):
        cfg = ServiceConfig(cors_allowed_origins=("https://tracker.example",))
        with TestClient(create_app(cfg)) as client:
            resp = client.post(
                "/api/v1/suggest",
                json={"description": "Crash on save."},
                headers={"Origin": "https://evil.example"},
            )
        assert "access-control-allow-origin" not in resp.headers

    def test_preflight_for_allowed_origin(self):
        cfg = ServiceConfig(cors_allowed_origins=("https://tracker.example",))
        with TestClient(create_app(cfg)) as client:
            resp = client.options(
                "/api/v1/suggest",
                headers={
                    "Origin": "https://tracker.example",
                    "Access-Control-Request-Method": "POST",
                    "Access-Control-Request-Headers": "Content-Type",
                },
            )
        assert resp.status_code == 200
        assert resp.headers.get("access-control-allow-origin") == "https://tracker.example"

    def test_default_allow_list_includes_tracker_origin(self):
        assert "https://github.com" in ServiceConfig().cors_allowed_origins


class TestServiceConfig:
    def test_rejects_small_body_limit(self):
        with pytest.raises(ValueError):
            ServiceConfig(max_body_bytes=100)

    def test_rejects_bad_port(self):
        with pytest.raises(ValueError):
            ServiceConfig(bind_address="127.0.0.1:0")
        with pytest.raises(ValueError):
            ServiceConfig(bind_address="127.0.0.1:70000")
        with pytest.raises(ValueError):
            ServiceConfig(bind_address="no-port-here")

    def test_host_port_parsing(self):
        cfg = ServiceConfig(bind_address="0.0.0.0:9001")
        assert cfg.host == "0.0.0.0" and cfg.port == 9001
