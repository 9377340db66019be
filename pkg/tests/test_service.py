"""HTTP service endpoints: happy paths, error mapping, payload shapes."""

import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from jacobi_scatter import __version__
from jacobi_scatter.service import create_app

from conftest import random_potential


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def payload_of(pot):
    return {
        "L": pot.dim,
        "entries": [
            {
                "n": n,
                "re": pot.value(n).real.tolist(),
                "im": pot.value(n).imag.tolist(),
            }
            for n in pot.sites
        ],
    }


FREE1 = {"L": 1, "entries": []}


def as_complex(m):
    return np.asarray(m["re"], dtype=float) + 1j * np.asarray(m["im"], dtype=float)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


def test_jost_free_potential(client):
    body = {
        "potential": FREE1,
        "z_re": 0.5,
        "direction": "plus",
        "window_lo": -3,
        "window_hi": 3,
    }
    resp = client.post("/jost", json=body)
    assert resp.status_code == 200
    data = resp.json()
    assert data["sites"] == list(range(-3, 4))
    vals = [as_complex(v) for v in data["values"]]
    for n, v in zip(data["sites"], vals):
        assert v[0, 0] == pytest.approx(0.5**n, abs=1e-12)


def test_jost_series_agrees_with_volterra(client):
    pot = random_potential(90, dim=2, lo=-1, hi=1, scale=0.5)
    base = {"potential": payload_of(pot), "z_re": 0.3, "z_im": -0.4}
    a = client.post("/jost", json={**base, "representation": "volterra"}).json()
    b = client.post("/jost", json={**base, "representation": "series"}).json()
    assert a["sites"] == b["sites"]
    for va, vb in zip(a["values"], b["values"]):
        np.testing.assert_allclose(as_complex(va), as_complex(vb), atol=1e-9)


def test_jost_band_edge_is_validation_error(client):
    resp = client.post("/jost", json={"potential": FREE1, "z_re": 1.0})
    assert resp.status_code == 422
    data = resp.json()
    assert data["kind"] == "validation"
    assert "band-edge" in data["message"]


def test_scatter_free(client):
    k = 1.0
    resp = client.post(
        "/scatter",
        json={"potential": {"L": 2, "entries": []}, "z_re": math.cos(k), "z_im": -math.sin(k)},
    )
    assert resp.status_code == 200
    data = resp.json()
    np.testing.assert_allclose(as_complex(data["T_plus"]), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(as_complex(data["R_minus"]), np.zeros((2, 2)), atol=1e-12)
    z = complex(math.cos(k), -math.sin(k))
    nu = 1j / (z - 1 / z)
    assert data["nu_re"] == pytest.approx(nu.real, abs=1e-12)
    assert data["nu_im"] == pytest.approx(nu.imag, abs=1e-12)


def test_scatter_rejects_interior_point(client):
    resp = client.post("/scatter", json={"potential": FREE1, "z_re": 0.5})
    assert resp.status_code == 422
    assert resp.json()["kind"] == "validation"


def test_green_free_value(client):
    resp = client.post("/green", json={"potential": FREE1, "energy_re": 3.0})
    assert resp.status_code == 200
    val = as_complex(resp.json()["value"])
    assert val[0, 0] == pytest.approx(-0.4472135954999579, abs=1e-12)


def test_green_band_energy_needs_boundary_endpoint(client):
    resp = client.post("/green", json={"potential": FREE1, "energy_re": 0.5})
    assert resp.status_code == 422
    assert "green_boundary" in resp.json()["message"] or "band" in resp.json()["message"]


def test_green_at_bound_state_is_numerical_error(client):
    body = {
        "potential": {"L": 1, "entries": [{"n": 0, "re": [[5.0]]}]},
        "energy_re": math.sqrt(29.0),
    }
    resp = client.post("/green", json=body)
    assert resp.status_code == 400
    data = resp.json()
    assert data["kind"] == "numerical"
    assert "eigenvalue" in data["message"]


def test_green_boundary_free_value(client):
    body = {"potential": {"L": 2, "entries": []}, "energy": 0.0, "side": "plus"}
    resp = client.post("/green-boundary", json=body)
    assert resp.status_code == 200
    val = as_complex(resp.json()["value"])
    np.testing.assert_allclose(val, 0.5j * np.eye(2), atol=1e-12)


def test_lap_endpoint(client):
    body = {
        "potential": FREE1,
        "alpha": 2.0,
        "rho": 1.0,
        "energies": [0.5, 0.5 + 1e-3, 0.5 + 1e-1],
        "window": 30,
    }
    resp = client.post("/lap", json=body)
    assert resp.status_code == 200
    data = resp.json()
    assert data["alpha"] == 2.0
    assert len(data["weighted_norms"]) == 3
    assert len(data["pairs"]) == 3
    assert data["max_ratio"] > 0
    assert math.isfinite(data["fitted_exponent"])


def test_lap_rejects_alpha_below_threshold(client):
    body = {"potential": FREE1, "alpha": 1.0, "rho": 1.0, "energies": [0.4, 0.5]}
    resp = client.post("/lap", json=body)
    assert resp.status_code == 422
    assert "alpha" in resp.json()["message"]


def test_evolve_free_bessel_value(client):
    from scipy.special import jv

    body = {"potential": FREE1, "t": 1.0, "s": 0, "r": 0, "method": "both"}
    resp = client.post("/evolve", json=body)
    assert resp.status_code == 200
    val = as_complex(resp.json()["value"])
    assert val[0, 0] == pytest.approx(jv(0, 2.0), abs=1e-10)


def test_evolve_crosscheck_conflict_is_409(client):
    pot = random_potential(91, dim=2, lo=-1, hi=1)
    body = {
        "potential": payload_of(pot),
        "t": 2.0,
        "s": 1,
        "r": 0,
        "method": "both",
        "cross_tol": 1e-18,
    }
    resp = client.post("/evolve", json=body)
    assert resp.status_code == 409
    assert resp.json()["kind"] == "crosscheck"


def test_decay_endpoint(client):
    body = {"potential": FREE1, "t_min": 5.0, "t_max": 50.0, "samples": 6, "window": 130}
    resp = client.post("/decay", json=body)
    assert resp.status_code == 200
    data = resp.json()
    assert len(data["times"]) == 6
    assert data["times"][0] == pytest.approx(5.0)
    assert data["times"][-1] == pytest.approx(50.0)
    assert all(s > 0 for s in data["sup_norms"])
    assert data["slope"] < 0


def test_decay_rejects_bad_time_range(client):
    body = {"potential": FREE1, "t_min": 50.0, "t_max": 5.0}
    resp = client.post("/decay", json=body)
    assert resp.status_code == 422
    assert resp.json()["kind"] == "validation"


def test_verify_endpoint(client):
    resp = client.post("/verify", json={"potential": FREE1, "suite": "lap"})
    assert resp.status_code == 200
    data = resp.json()
    assert data["suite"] == "lap"
    assert data["passed"] is True
    assert {c["name"] for c in data["checks"]} == {
        "lap_alpha_domination",
        "lap_eta_stability",
        "lap_holder",
    }


def test_missing_field_is_422_with_location(client):
    resp = client.post("/green", json={"potential": FREE1})
    assert resp.status_code == 422
    data = resp.json()
    assert data["kind"] == "validation"
    assert "energy_re" in data["message"]


def test_non_hermitian_potential_rejected(client):
    body = {
        "potential": {
            "L": 2,
            "entries": [{"n": 0, "re": [[0.0, 1.0], [0.0, 0.0]]}],
        },
        "energy_re": 3.0,
    }
    resp = client.post("/green", json=body)
    assert resp.status_code == 422
    data = resp.json()
    assert data["kind"] == "validation"
    assert "Hermitian" in data["message"]


def test_unknown_suite_rejected_by_schema(client):
    resp = client.post("/verify", json={"potential": FREE1, "suite": "bogus"})
    assert resp.status_code == 422
