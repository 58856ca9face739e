from app.modules.ingest.edge_parser import EdgeParser, EdgeRecord
from app.modules.ingest.features import (
    FeatureReader,
    FeatureTable,
    build_feature_matrix,
    missing_feature_vector,
    write_feature_file,
)
from app.modules.ingest.builder import CovidTargetSet, build_graph, inject_covid_nodes
from app.modules.ingest.split import (
    DatasetSplit,
    negative_pool_size,
    pairs_to_array,
    read_split,
    sample_negatives,
    split_links,
    with_negatives,
    write_split,
)
from app.modules.ingest.serializer import (
    IngestArtifacts,
    load_artifacts,
    read_graph,
    read_targets,
    write_graph,
    write_targets,
)

__all__ = [
    "EdgeParser",
    "EdgeRecord",
    "FeatureReader",
    "FeatureTable",
    "build_feature_matrix",
    "missing_feature_vector",
    "write_feature_file",
    "CovidTargetSet",
    "build_graph",
    "inject_covid_nodes",
    "DatasetSplit",
    "negative_pool_size",
    "pairs_to_array",
    "read_split",
    "sample_negatives",
    "split_links",
    "with_negatives",
    "write_split",
    "IngestArtifacts",
    "load_artifacts",
    "read_graph",
    "read_targets",
    "write_graph",
    "write_targets",
]
