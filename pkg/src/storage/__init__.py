"""Result artifacts on disk."""

from src.storage.results import ResultWriter, canonical_json, config_hash, emit, to_jsonable

__all__ = ["ResultWriter", "canonical_json", "config_hash", "emit", "to_jsonable"]
