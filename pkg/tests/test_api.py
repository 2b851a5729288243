"""
HTTP contract tests for the classification service.
"""
from collections import defaultdict

import pytest
from fastapi.testclient import TestClient

from app.adapters.embedding_providers.hashing_provider import HashingProvider
from app.core.errors import BundleError, BundleNotLoaded, ProviderError
from app.main import create_app, load_into_store
from app.repositories.memory.bundle_store import BundleStore
from app.services.classify_service import ClassifyService


@pytest.fixture
def client(toy_bundle):
    return TestClient(create_app(toy_bundle))


class _Unreachable:
    """Stands in for a remote provider that is down."""

    provider_id = "hashing-fnv1a-64"
    dimension = 64

    def embed_batch(self, texts):
        raise ProviderError(self.provider_id, "connection refused")


class TestClassify:
    """POST /v1/classify."""

    def test_trained_phrase_ranks_first(self, client):
        """Test that a phrase seen in training ranks its class first."""
        response = client.post("/v1/classify", json={"text": "demolition of buildings"})
        assert response.status_code == 200
        data = response.json()
        assert data["predictions"][0]["code"] == "4311"
        assert data["predictions"][0]["description"] == "Demolition"

    def test_probabilities_descending_and_normalised(self, client, toy_bundle):
        """Test that the full ranking is descending and sums to one."""
        k = len(toy_bundle.weights.labels)
        data = client.post("/v1/classify", json={"text": "freight lorry transport", "top_n": k}).json()
        probabilities = [p["probability"] for p in data["predictions"]]
        assert len(probabilities) == k
        assert probabilities == sorted(probabilities, reverse=True)
        assert sum(probabilities) == pytest.approx(1.0, abs=1e-6)

    def test_top_n(self, client):
        """Test limiting the ranking with top_n."""
        data = client.post("/v1/classify", json={"text": "site clearing", "top_n": 2}).json()
        assert len(data["predictions"]) == 2

    def test_default_top_n_is_capped_by_label_count(self, client, toy_bundle):
        """Test the default top_n against a small label set."""
        data = client.post("/v1/classify", json={"text": "site clearing"}).json()
        assert len(data["predictions"]) == min(5, len(toy_bundle.weights.labels))

    def test_division_rollup(self, client, toy_bundle):
        """Test that division shares are sums over their classes."""
        k = len(toy_bundle.weights.labels)
        data = client.post("/v1/classify", json={"text": "excavation of soil", "top_n": k}).json()
        expected = defaultdict(float)
        for p in data["predictions"]:
            expected[p["code"][:2]] += p["probability"]
        rollup = {d["division"]: d["probability"] for d in data["division_rollup"]}
        assert set(rollup) == set(expected)
        for division, probability in expected.items():
            assert rollup[division] == pytest.approx(probability, abs=1e-9)

    def test_metadata(self, client, toy_bundle):
        """Test that the response names the provider and bundle version."""
        data = client.post("/v1/classify", json={"text": "demolition"}).json()
        assert data["provider_id"] == "hashing-fnv1a-64"
        assert data["bundle_version"] == toy_bundle.version

    def test_identical_requests_identical_bodies(self, client):
        """Test that repeating a request returns the same bytes."""
        body = {"text": "office tower erection", "top_n": 3}
        assert client.post("/v1/classify", json=body).content == client.post("/v1/classify", json=body).content

    def test_empty_text(self, client):
        """Test that empty text returns 400."""
        response = client.post("/v1/classify", json={"text": ""})
        assert response.status_code == 400
        assert "error" in response.json()

    def test_whitespace_text(self, client):
        """Test that whitespace-only text returns 400."""
        assert client.post("/v1/classify", json={"text": "   "}).status_code == 400

    def test_missing_text(self, client):
        """Test that a body without text returns 400."""
        response = client.post("/v1/classify", json={"top_n": 3})
        assert response.status_code == 400
        assert "error" in response.json()

    def test_bad_top_n(self, client):
        """Test that a non-positive top_n returns 400."""
        assert client.post("/v1/classify", json={"text": "demolition", "top_n": 0}).status_code == 400

    def test_provider_unreachable(self, toy_bundle):
        """Test that a failing provider returns 503."""
        client = TestClient(create_app(toy_bundle, _Unreachable()))
        response = client.post("/v1/classify", json={"text": "demolition"})
        assert response.status_code == 503
        assert "connection refused" in response.json()["error"]


class TestHealth:
    """GET /v1/health."""

    def test_reports_bundle(self, client, toy_bundle):
        """Test the health payload for a loaded bundle."""
        response = client.get("/v1/health")
        assert response.status_code == 200
        assert response.json() == {
            "status": "ok",
            "bundle_version": toy_bundle.version,
            "provider_id": "hashing-fnv1a-64",
            "labels": 4,
        }

    def test_no_bundle_loaded(self):
        """Test that health returns 503 with nothing loaded."""
        response = TestClient(create_app()).get("/v1/health")
        assert response.status_code == 503
        assert response.json() == {"error": "no bundle loaded"}


class TestTaxonomyLookup:
    """GET /v1/taxonomy/{code}."""

    def test_node_with_ancestors(self, client):
        """Test looking up a class with its ancestor chain."""
        data = client.get("/v1/taxonomy/4311").json()
        assert data["node"]["description"] == "Demolition"
        assert [a["code"] for a in data["ancestors"]] == ["431", "43", "F"]

    def test_unknown_code(self, client):
        """Test that an unknown code returns 404."""
        response = client.get("/v1/taxonomy/9999")
        assert response.status_code == 404
        assert "error" in response.json()


class TestBundleStore:
    """Loading and swapping the served bundle."""

    def test_load_into_store(self, toy_config, toy_bundle):
        """Test loading a bundle directory into the store."""
        bundle = load_into_store(toy_config.output_dir)
        loaded, provider = BundleStore.instance().get()
        assert loaded.version == toy_bundle.version
        assert provider.provider_id == bundle.weights.provider_id

    def test_swap_rejects_wrong_provider(self, toy_bundle):
        """Test that a provider not matching the head is refused."""
        with pytest.raises(BundleError):
            BundleStore.instance().swap(toy_bundle, HashingProvider(8))

    def test_invalid_bundle_refuses_to_load(self, tmp_path):
        """Test that a broken bundle never reaches the store."""
        with pytest.raises(BundleError):
            load_into_store(tmp_path)


class TestClassifyService:
    """The service the routers share, over an injected store."""

    def test_answers_from_its_own_store(self, toy_bundle):
        """Test that a service reads the store it was given, not the process-wide one."""
        store = BundleStore()
        store.swap(toy_bundle, HashingProvider(64))
        service = ClassifyService(store)
        response = service.classify("demolition of buildings", top_n=2)
        assert response.predictions[0].code == "4311"
        assert len(response.predictions) == 2
        assert service.health()["bundle_version"] == toy_bundle.version
        assert BundleStore.instance().get() is None

    def test_nothing_loaded(self):
        """Test that every entry point reports a missing bundle."""
        service = ClassifyService(BundleStore())
        for call in (lambda: service.classify("steel"), service.health, lambda: service.lookup("F")):
            with pytest.raises(BundleNotLoaded):
                call()

    def test_lookup_unknown_code(self, toy_bundle):
        """Test that an unknown code gives None."""
        store = BundleStore()
        store.swap(toy_bundle, HashingProvider(64))
        assert ClassifyService(store).lookup("9999") is None
