"""
Shared fixtures: sample data shipped in app/data, a toy corpus small enough
to train in well under a second, and a trained bundle on disk.
"""
from pathlib import Path

import pytest

from app.models.embedding import ProviderDescriptor
from app.models.head import TrainConfig
from app.models.pipeline import PipelineConfig
from app.repositories.memory.bundle_store import BundleStore
from app.services.pipeline_service import run_pipeline
from app.services.taxonomy_service import load_taxonomy

DATA_DIR = Path(__file__).resolve().parent.parent / "app" / "data"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"

BRANCH_CSV = DATA_DIR / "isic_demolition_branch.csv"
SAMPLE_TAXONOMY_CSV = DATA_DIR / "isic_sample.csv"

TOY_ACTIVITIES = """activity_name,isic_class
demolition of buildings,4311
demolition of buildings,4311
demolition of buildings,4311
wrecking concrete structure,4311
dismantling brick masonry,4311
selective deconstruction work,4311
excavation with hydraulic digger,4312
site clearing and levelling,4312
soil removal earthworks,4312
skid steer loader excavation,4312
land drainage preparation,4312
residential house construction,4100
office tower erection,4100
timber frame dwelling,4100
warehouse hall assembly,4100
multi storey apartment block,4100
freight lorry transport,4923
articulated truck haulage,4923
road cargo delivery van,4923
heavy goods vehicle shipment,4923
container trucking service,4923
"""


@pytest.fixture
def sample_taxonomy():
    return load_taxonomy(SAMPLE_TAXONOMY_CSV)


@pytest.fixture
def toy_config(tmp_path):
    """Pipeline config over the toy corpus with one hashing provider."""
    data = tmp_path / "activities.csv"
    data.write_text(TOY_ACTIVITIES, encoding="utf-8")
    return PipelineConfig(
        taxonomy_path=str(SAMPLE_TAXONOMY_CSV),
        dataset_path=str(data),
        providers=[ProviderDescriptor(endpoint="hashing:64")],
        output_dir=str(tmp_path / "bundle"),
        train=TrainConfig(learning_rate=0.05, epochs=100),
    )


@pytest.fixture
def toy_bundle(toy_config):
    return run_pipeline(toy_config)


@pytest.fixture(autouse=True)
def _empty_bundle_store():
    """The store is a process-wide singleton; no test sees another's bundle."""
    BundleStore.instance().clear()
    yield
    BundleStore.instance().clear()
