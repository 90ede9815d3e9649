"""whomp: distribution-preserving balanced partitioning.

Splits a dataset into equal-size subgroups whose empirical distributions
stay close to the full sample, using exact discrete optimal transport:
balanced clustering, in-family random selection, barycenter matching,
baselines, diagnostics, and an experiment harness.
"""

__version__ = "0.1.0"

from .core import (
    Dataset,
    Partition,
    Rng,
    dataset_from_csv,
    dataset_to_csv,
    partition_from_csv,
    partition_to_csv,
    partition_validate,
    random_balanced_assignment,
    variance,
)
from .transport import (
    DiscreteMeasure,
    TransportPlan,
    capacitated_assignment,
    match_uniform,
    w2_1d,
    w2_exact,
)
from .barycenter import (
    BarycenterResult,
    barycenter_exact_small,
    barycenter_fixed_point,
    barycenter_multistart,
)
from .clustering import BalancedKMeansResult, anticluster_exchange, balanced_kmeans
from .partitioners import (
    METHODS,
    PocockSimonConfig,
    QPSampler,
    RandomSplitSampler,
    SubgroupRequest,
    enumerate_QP,
    make_partition,
    pocock_simon,
    whomp_matching,
    whomp_random,
)
from .metrics import (
    AteTestResult,
    HomogeneityReport,
    ate_randomization_test,
    ate_variance_bound_check,
    homogeneity_report,
    lipschitz_discrepancy,
    normalized_entropy,
)
from .graphs import (
    Graph,
    SpectrumReport,
    graph_from_edgelist_csv,
    graph_to_edgelist_csv,
    laplacian_spectrum,
    sbm_generate,
    spectral_embedding,
    spectrum_report,
    subgraph_spectrum_w2,
)

__all__ = [name for name in dir() if not name.startswith("_")]
