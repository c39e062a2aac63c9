"""Compact planar embeddings: parallel construction and navigation.

Stores a connected planar embedding in three bit sequences totalling 4m bits
plus sublinear directories, built in parallel from a spanning tree, and
answers degree, neighbour and face queries directly on the bits.
"""

from .accounting import MemoryAccountant
from .bitvector import BitSequence, build_rank_select, pack_bits
from .construct import (CompactEmbedding, EulerTour, assemble,
                        build_compact, build_euler_tour, list_ranking,
                        sequential_build, tour_edge_ids)
from .embedding import (PgFormatError, PlanarEmbedding, decode, decode_tree,
                        generate_grid_triangulation, load_pg,
                        parse_embedding, save_pg, validate_embedding,
                        write_embedding)
from .parens import ParenSequence, build_bp
from .queries import Navigator
from .spanning import (SpanningTreeData, build_tree_adjacency,
                       claim_parent_edges, dfs_parent_edges,
                       parallel_spanning_tree, prefix_sum,
                       sequential_dfs_tree, tree_structures_from_edges)

__version__ = "0.1.0"

__all__ = [
    "BitSequence", "CompactEmbedding", "EulerTour", "MemoryAccountant",
    "Navigator", "ParenSequence", "PgFormatError", "PlanarEmbedding",
    "SpanningTreeData", "assemble", "build_bp", "build_compact",
    "build_euler_tour", "build_rank_select", "build_tree_adjacency",
    "claim_parent_edges", "decode", "decode_tree", "dfs_parent_edges",
    "generate_grid_triangulation", "list_ranking", "load_pg", "pack_bits",
    "parallel_spanning_tree", "parse_embedding", "prefix_sum", "save_pg",
    "sequential_build", "sequential_dfs_tree", "tour_edge_ids",
    "tree_structures_from_edges", "validate_embedding", "write_embedding",
]
