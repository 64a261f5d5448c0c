"""Index data ingestion and run output writers."""

from .data import IndexDataset, get_dataset_name_from_path, ingest_csv
from .utils import RunManifest

__all__ = ["IndexDataset", "ingest_csv", "get_dataset_name_from_path", "RunManifest"]
