"""Datastore indexing, similarity ranking and persistence."""

from .datastore import Datastore, IndexItem, StoreEntry, append, build_store, column_names
from .persistence import FORMAT_VERSION, STORE_MAGIC, load, save
from .retrieval import RankedItem, RankedResults, retrieve, score_all

__all__ = [
    'Datastore', 'IndexItem', 'StoreEntry', 'append', 'build_store', 'column_names',
    'FORMAT_VERSION', 'STORE_MAGIC', 'load', 'save',
    'RankedItem', 'RankedResults', 'retrieve', 'score_all',
]
