from app.modules.graph.models import EntityKind, NodeId, TypedEdge, HeteroGraph, dedup_edges
from app.modules.graph.sparse import (
    SparseMatrix,
    build_adjacency,
    normalize_adjacency,
    add_self_loops,
    spmm,
    degrees,
)

__all__ = [
    "EntityKind",
    "NodeId",
    "TypedEdge",
    "HeteroGraph",
    "dedup_edges",
    "SparseMatrix",
    "build_adjacency",
    "normalize_adjacency",
    "add_self_loops",
    "spmm",
    "degrees",
]
