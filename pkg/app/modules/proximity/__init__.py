from app.modules.proximity.interactome import (
    GeneInteractome,
    build_interactome,
    degree_bin,
    target_genes,
    target_gene_sets,
)
from app.modules.proximity.scoring import (
    ProximityScore,
    shortest_paths,
    proximity,
    sample_degree_matched,
    enumerate_degree_matched,
    z_score,
    rank_by_proximity,
)

__all__ = [
    "GeneInteractome",
    "build_interactome",
    "degree_bin",
    "target_genes",
    "target_gene_sets",
    "ProximityScore",
    "shortest_paths",
    "proximity",
    "sample_degree_matched",
    "enumerate_degree_matched",
    "z_score",
    "rank_by_proximity",
]
