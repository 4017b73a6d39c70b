"""Submodular subset selection: set functions, information measures, greedy maximizers."""

from .base import (ConditionalGain, ConditionalMutualInformation, FactorizationError,
                   MemoOwnershipError, MemoState, MutualInformation, SetFunction,
                   generic_cg, generic_cmi, generic_mi)
from .classic import (CONCAVE_CHOICES, Clustered, DisparityMin, DisparitySum,
                      FacilityLocation, FeatureBased, GraphCut, LogDeterminant,
                      ProbabilisticSetCover, SetCover, chol_logdet, clustered_function)
from .dataio import (read_binary_matrix, read_csv_matrix, read_matrix,
                     write_binary_matrix, write_csv_matrix)
from .information import (ConcaveOverModular, FacilityLocationCG, FacilityLocationCMI,
                          FacilityLocationMI, FacilityLocationQueryMI, GraphCutCG,
                          GraphCutMI, LogDeterminantCG, LogDeterminantCMI,
                          LogDeterminantMI, PrivateContext, QueryContext,
                          private_context, prob_set_cover_cg, prob_set_cover_cmi,
                          prob_set_cover_mi, query_context, set_cover_cg,
                          set_cover_cmi, set_cover_mi)
from .kernels import (ClusterMap, CrossKernel, SimilarityKernel, build_cross_kernel,
                      build_dense_kernel, build_sparse_kernel, cluster_ground_set,
                      kernel_from_matrix, per_cluster_kernels)
from .optimizers import (OPTIMIZERS, GreedyResult, OptimizeSpec, lazier_than_lazy_greedy,
                         lazy_greedy, maximize, naive_greedy, stochastic_greedy)
from .oracle import ExhaustiveResult, brute_force_opt
from .synthetic import clustered_points, clusters_with_outliers

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
