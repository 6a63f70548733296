"""Quadratic decomposable submodular function minimization.

Dual solvers (random coordinate descent, alternating projections), conic
projection subroutines (min-norm-point, Frank-Wolfe, exact cut projection),
hypergraph PageRank with sweep-cut partitioning, and hypergraph
semi-supervised learning.
"""

from .atoms import (CUT_KINDS, DegreeVariant, Kind, ProblemInstance,
                    SubmodularAtom, cardinality_atom, degree_vector,
                    directed_hyperedge, evaluate, graph_edge, greedy_lmo,
                    lovasz, primal_objective, undirected_hyperedge)
from .hypergraph import (HyperEdge, Hypergraph, LSCurve, SweepResult,
                         cheeger_classify, conductance, cut_stats,
                         directed_edge, edge_atoms, generate_cardinality_bench,
                         generate_cluster_hypergraph, ls_curve, pagerank,
                         ssl_instance, ssl_solve, sweep_cut, undirected_edge)
from .projection import (ProjectionResult, Status, active_set_qp, check_kkt,
                         conic_fw, conic_mnp, exact_directed)
from .solvers import (Backend, DualState, SolveReport, SolverConfig, ap_solve,
                      dual_objective, duality_gap, mu_estimate,
                      primal_from_dual, rcd_solve)

__version__ = "0.1.0"
