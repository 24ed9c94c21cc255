from tailbound.index.base import BaseIndex, SearchResult
from tailbound.index.flat import FlatIndex, build_flat, flat_search
from tailbound.index.hnsw import HnswIndex, build_hnsw, search_hnsw_baseline, search_hnsw_progressive
from tailbound.index.ivf import IVFFlatIndex, build_ivfflat, kmeans, search_ivfflat
from tailbound.index.persistence import load_index, save_index

__all__ = [
    "BaseIndex",
    "FlatIndex",
    "HnswIndex",
    "IVFFlatIndex",
    "SearchResult",
    "build_flat",
    "build_hnsw",
    "build_ivfflat",
    "flat_search",
    "kmeans",
    "load_index",
    "save_index",
    "search_hnsw_baseline",
    "search_hnsw_progressive",
    "search_ivfflat",
]
