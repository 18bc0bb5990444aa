import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from zonalflow.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


BASE_REQ = {
    "altitude_km": 600.0,
    "i_circ_deg": 63.45,
    "n_max": 6,
    "resolution": 24,
}


def test_fields_catalog(client):
    r = client.get("/fields")
    assert r.status_code == 200
    catalog = r.json()
    assert len(catalog) == 1
    entry = catalog[0]
    assert entry["n_max"] == 50
    assert entry["reference_radius"] == pytest.approx(1738.0)
    # catalog is stable across requests
    assert client.get("/fields").json() == catalog


def test_phasemap_basic(client):
    r = client.post("/phasemap", json=BASE_REQ)
    assert r.status_code == 200
    payload = r.json()
    assert payload["resolution"] == 24
    assert payload["e_impact"] == pytest.approx(600.0 / 2338.0, rel=1e-12)
    assert len(payload["values"]) == 24


def test_phasemap_degree2_omega_independent(client):
    r = client.post("/phasemap", json={**BASE_REQ, "n_max": 2})
    rows = r.json()["values"]
    for row in rows:
        live = [v for v in row if v is not None]
        if live:
            assert max(live) - min(live) <= 1e-13 * max(1.0, abs(live[0]))


def test_repeated_request_identical_body(client):
    r1 = client.post("/phasemap", json=BASE_REQ)
    r2 = client.post("/phasemap", json=BASE_REQ)
    assert r1.content == r2.content


def test_statelessness_under_permutation(client):
    req_a = dict(BASE_REQ)
    req_b = {**BASE_REQ, "n_max": 4}
    a1 = client.post("/phasemap", json=req_a).content
    b1 = client.post("/phasemap", json=req_b).content
    b2 = client.post("/phasemap", json=req_b).content
    a2 = client.post("/phasemap", json=req_a).content
    assert a1 == a2 and b1 == b2


def test_degree_toggles(client):
    r = client.post("/phasemap", json={**BASE_REQ, "degrees": [2, 3]})
    assert r.status_code == 200
    assert r.json()["degrees"] == [2, 3]
    r = client.post("/phasemap", json={**BASE_REQ, "degrees": []})
    assert r.status_code == 400
    r = client.post("/phasemap", json={**BASE_REQ, "degrees": [1]})
    assert r.status_code == 400


def test_error_codes(client):
    assert client.post("/phasemap", json={"i_circ_deg": 10.0}).status_code == 400
    assert client.post("/phasemap", json={**BASE_REQ, "resolution": 4096}).status_code == 400
    assert client.post("/phasemap", json={**BASE_REQ, "n_max": 99}).status_code == 400
    bad = {**BASE_REQ}
    bad["altitude_km"] = -2000.0
    assert client.post("/phasemap", json=bad).status_code == 422
    assert client.post(
        "/phasemap", content=b"{not json", headers={"content-type": "application/json"}
    ).status_code == 400


def test_frozen_endpoint(client):
    req = {"altitude_km": 600.0, "i_circ_deg": 63.45, "n_max": 12, "resolution": 24}
    r = client.post("/frozen", json=req)
    assert r.status_code == 200
    body = r.json()
    non_impact = [fo for fo in body["frozen"] if not fo["impact"]]
    assert len(non_impact) == 1
    assert non_impact[0]["e"] == pytest.approx(0.094, abs=0.005)
    assert non_impact[0]["omega"] == pytest.approx(-math.pi / 2, abs=1e-6)


def test_ramp_streams_incremental_frames(client):
    req = {**BASE_REQ, "ramp_degrees": [2, 3, 4, 5]}
    r = client.post("/ramp", json=req)
    assert r.status_code == 200
    lines = [json.loads(l) for l in r.text.strip().split("\n")]
    assert [f["degree"] for f in lines] == [2, 3, 4, 5]
    assert all("map" in f for f in lines)
    # each frame matches the direct phasemap response for that truncation
    direct = client.post("/phasemap", json={**BASE_REQ, "n_max": 3}).json()
    assert lines[1]["map"] == direct


def test_ramp_validation(client):
    assert client.post("/ramp", json={**BASE_REQ, "ramp_degrees": []}).status_code == 400
    assert client.post("/ramp", json=BASE_REQ).status_code == 400


def test_bench_endpoint_caches(client):
    r1 = client.get("/bench", params={"degrees": "3:4"})
    assert r1.status_code == 200
    assert r1.json()["cached"] is False
    r2 = client.get("/bench", params={"degrees": "3:4"})
    assert r2.json()["cached"] is True
    assert r2.json()["records"] == r1.json()["records"]


def test_unknown_field_rejected(client):
    assert client.post(
        "/phasemap", json={**BASE_REQ, "field": "nonexistent"}
    ).status_code == 400
