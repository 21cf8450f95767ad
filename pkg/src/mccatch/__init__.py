"""Microcluster outlier detection over any metric space.

``run_mccatch`` is the entry point; the submodules expose each stage.
"""
from .detect import MicroclusterSet, cutoff_position, compute_cutoff, gel_microclusters, spot_outliers
from .errors import ConfigurationError, ContractViolation, DegenerateDatasetError, InputError, McCatchError
from .index import MetricTree, build_index, count_cross_join, count_self_join, estimate_diameter
from .metric import DatasetHandle, MetricSpec, levenshtein
from .oracle import NeighborProfile, OraclePlot, RadiiSchedule, build_oracle_plot, neighbor_profiles, radii_schedule
from .score import McCatchResult, run_mccatch

__version__ = "0.1.0"
