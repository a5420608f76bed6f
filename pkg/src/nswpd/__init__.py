"""Node-scanwidth tree-extensions and phylogenetic diversity on rooted networks."""

__version__ = "0.1.0"

from .core import Dag, Network, offspring_edges, pd_map_value, validate_network
from .exact import heuristic_extension, nsw_pipeline, optimal_extension_exact
from .extension import TreeExtension, bag, is_tree_extension, nsw_of
from .newick import parse_costs, parse_enewick, serialize_enewick
from .pd import compute_min_tree_pd, solve_b_map_pd, solve_b_maxtree_pd

__all__ = [
    "Dag", "Network", "TreeExtension", "bag", "compute_min_tree_pd", "heuristic_extension",
    "is_tree_extension", "nsw_of", "nsw_pipeline", "offspring_edges", "optimal_extension_exact",
    "parse_costs", "parse_enewick", "pd_map_value", "serialize_enewick", "solve_b_map_pd",
    "solve_b_maxtree_pd", "validate_network",
]
