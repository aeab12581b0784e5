import pytest
from fastapi.testclient import TestClient

from app.core import catalog
from app.main import app
from app.models.schemas import AltFormSchema, LieSubalgebraSchema, ReductiveModelSchema
from tests.test_cli import G2_FORM_JSON

# without a context manager the startup hook never runs, so the report cache stays disabled
client = TestClient(app)


def test_root_lists_endpoints():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["endpoints"]["verify"] == "/api/verify/{suite}"


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["redis"] == "disabled"
    assert body["checks"] > 0


def test_suites():
    response = client.get("/api/verify/suites")
    assert response.status_code == 200
    suites = {s["name"]: s["checks"] for s in response.json()}
    assert suites["all"] == sum(v for k, v in suites.items() if k != "all")


def test_verify_suite():
    response = client.get("/api/verify/dim3", params={"seed": 3})
    assert response.status_code == 200
    assert "X-Process-Time" in response.headers
    report = response.json()
    assert report["suite"] == "dim3"
    assert report["seed"] == 3
    assert report["failed"] == 0
    assert report["cached"] is False
    assert report["processingTime"] >= 0


def test_verify_rejects_bad_queries():
    response = client.get("/api/verify/nope")
    assert response.status_code == 400
    assert response.json()["error"] == "UnknownSuiteError"
    assert client.get("/api/verify/dim3", params={"tol": -1}).status_code == 422
    assert client.get("/api/verify/dim3", params={"mode": "decimal"}).status_code == 422


def test_stabilizer():
    response = client.post("/api/algebra/stabilizer", json={"form": G2_FORM_JSON})
    assert response.status_code == 200
    body = response.json()
    assert body["dimension"] == 14
    assert len(body["algebra"]["basis"]) == 14


@pytest.mark.parametrize("form", [
    {**G2_FORM_JSON, "entries": [{"idx": [3, 2, 1], "num": 1, "den": 1}]},
    {**G2_FORM_JSON, "entries": [{"idx": [1, 2, 3]}]},
    {"dim": 0, "degree": 3, "entries": []},
])
def test_stabilizer_rejects_malformed_forms(form):
    assert client.post("/api/algebra/stabilizer", json={"form": form}).status_code == 422


def test_stabilizer_rejects_indefinite_gram():
    gram = [[{"num": (1 if i == j else 0) * (-1 if i == 6 else 1), "den": 1} for j in range(7)] for i in range(7)]
    response = client.post("/api/algebra/stabilizer", json={"form": G2_FORM_JSON, "gram": gram})
    assert response.status_code == 400
    assert response.json()["error"] == "DegenerateFormError"
    assert client.post("/api/algebra/stabilizer", json={"form": G2_FORM_JSON, "gram": gram[:3]}).status_code == 422


def test_decompose():
    g = catalog.build("product-vol3").tensors["g"]
    payload = {"algebra": LieSubalgebraSchema.from_algebra(g).model_dump(), "seed": 1}
    response = client.post("/api/algebra/decompose", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert sorted(body["dims"]) == [3, 3]
    assert body["seed"] == 1


def test_holonomy(kxk_half):
    payload = {"model": ReductiveModelSchema.from_model(kxk_half.model).model_dump()}
    response = client.post("/api/algebra/holonomy", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["dimension"] == 3
    assert body["metric"] is True
    torsion = AltFormSchema.model_validate(body["torsionForm"]).to_form()
    assert torsion == kxk_half.tau * 2


def test_catalog_models():
    response = client.get("/api/catalog/models")
    assert response.status_code == 200
    names = [m["name"] for m in response.json()]
    assert names == list(catalog.MODEL_BUILDERS)


def test_catalog_model():
    response = client.get("/api/catalog/models/kxk", params={"param": "t=1/2"})
    assert response.status_code == 200
    bundle = response.json()
    assert bundle["dim"] == 3
    assert bundle["params"]["t"] == {"num": 1, "den": 2}
    assert bundle["model"]["name"] == "kxk(t=1/2)"


def test_catalog_errors():
    assert client.get("/api/catalog/models/nope").status_code == 400
    response = client.get("/api/catalog/models/kxk", params={"param": "t=abc"})
    assert response.status_code == 400
    assert response.json()["error"] == "MalformedInputError"


def test_cache_status_without_redis():
    assert client.get("/api/cache/status").json() == {"status": "disabled"}
    assert client.post("/api/cache/clear").json()["success"] is False


def test_cache_clear_validates_suite():
    response = client.post("/api/cache/clear", params={"suite": "nope"})
    assert response.status_code == 400
    assert response.json()["error"] == "UnknownSuiteError"
