import numpy as np
import pytest
from fastapi.testclient import TestClient

from santalo.main import app

client = TestClient(app)

SQUARE = {"vertices": [[1, 1], [1, -1]], "label": "square"}
SHEARED = {"vertices": [[1.5, 1], [0.5, -1]], "label": "sheared"}


def test_healthz():
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


class TestSymfun:
    def test_elementary(self):
        response = client.post("/api/v1/symfun/elementary", json={"r": [1, 2, 3], "j": 2})
        assert response.status_code == 200
        body = response.json()
        assert body["status_code"] == 200
        assert body["data"]["value"] == pytest.approx(11.0)

    def test_degree_out_of_range(self):
        response = client.post("/api/v1/symfun/elementary", json={"r": [1, 2], "j": 5})
        assert response.status_code == 422
        assert response.json()["error"] == "domain_error"

    def test_missing_field(self):
        response = client.post("/api/v1/symfun/elementary", json={"r": [1, 2]})
        assert response.status_code == 422
        assert response.json()["error"] == "UnprocessableEntity"


class TestBodies:
    def test_support(self):
        response = client.post(
            "/api/v1/bodies/support", json={**SQUARE, "u": [1.0, 2.0]}
        )
        assert response.json()["data"]["value"] == pytest.approx(3.0)

    def test_steiner_preserves_volume(self):
        response = client.post("/api/v1/bodies/steiner", json={**SHEARED, "axis": 1})
        data = response.json()["data"]
        assert data["volume"] == pytest.approx(4.0)
        assert len(data["vertices"]) == 6


class TestPolar:
    def test_j_polar_of_square(self):
        response = client.post("/api/v1/polar/j-polar", json={"bodies": [SQUARE], "j": 2})
        assert response.status_code == 200
        data = response.json()["data"]
        assert data["bounded"] == "bounded"
        assert data["polytope"]["volume"] == pytest.approx(2.0)

    def test_verify_square_and_diamond(self):
        diamond = {"vertices": [[1, 0], [0, 1]]}
        response = client.post(
            "/api/v1/polar/verify", json={"bodies": [SQUARE, diamond], "j": 2}
        )
        assert response.json()["data"]["verdict"] == "PASS"


class TestMeasure:
    def test_bound_constant(self):
        response = client.get(
            "/api/v1/measure/bound-constant", params={"n": 2, "j": 2, "k": 3}
        )
        assert response.json()["data"]["value"] == pytest.approx(27.0)

    def test_lp_ball_volume(self):
        response = client.get("/api/v1/measure/lp-ball-volume", params={"n": 2, "p": 2})
        assert response.json()["data"]["volume"] == pytest.approx(np.pi)

    def test_volume_needs_exactly_one_body(self):
        response = client.post(
            "/api/v1/measure/volume",
            json={"polytope": SQUARE, "lp_ball": {"n": 2, "p": 2}},
        )
        assert response.status_code == 422

    def test_analytic_ball_volume(self):
        response = client.post(
            "/api/v1/measure/volume",
            json={"lp_ball": {"n": 2, "p": 2}, "method": "analytic"},
        )
        data = response.json()["data"]
        assert data["value"] == pytest.approx(np.pi)
        assert data["method"] == "exact"


def test_ball_value_of_two_squares():
    response = client.post("/api/v1/ball/value", json={"bodies": [SQUARE, SQUARE], "j": 2})
    assert response.json()["data"]["value"] == pytest.approx(32.0 / 9.0)


class TestExperiments:
    def test_degree_one_is_blocked(self):
        response = client.post(
            "/api/v1/experiments/verify-santalo",
            json={"k": 3, "j": 1, "samples": 1000},
        )
        assert response.status_code == 422
        assert response.json()["error"] == "blocked_parameter"

    def test_radial_check_on_balls(self):
        response = client.post(
            "/api/v1/experiments/radial-check",
            json={
                "corpus": "ball",
                "n": 2,
                "k": 2,
                "tuples": 1,
                "directions": 50,
                "samples": 1000,
                "seed": 11,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["meta"]["exit_code"] == 0
        assert body["data"]["cases"][0]["verdict"] == "PASS"
