"""G(n, p) edge configurations, graph property oracles and subgraph statistics."""
from .counting import count_cliques, count_copies, contains_copy, triangle_count, triangles
from .edges import EdgeConfig, edge_index, edge_pair, noise_edges, num_slots, sample_edges
from .giant import GiantReport, find_path, giant_robustness_experiment
from .moments import (OverlapMoments, clique_overlap_moments, expected_cliques, expected_copies,
                      expected_cycles_in_window, log_expected_copies, solve_clique_p,
                      solve_p_for_expected, two_clique_deltas)
from .patterns import (PatternGraph, clique, cycle, disjoint_edges, path, strictly_balanced,
                       two_triangles_path)
from .poisson import PoissonDiagnostics, bin_poisson_tv, poisson_diagnostics
from .properties import (Clique, ContainsPattern, CycleInRange, GraphProperty, MinDegree,
                         has_cycle_length_in, property_clique, property_contains,
                         property_cycle_in_range, property_min_degree)
