"""mixpoisson: mixed Poisson distributions, Stirling transforms, and exact
moment laws for a catalog of combinatorial models, with seeded simulators
and exhaustive small-case oracles."""

from .distribution import (
    ConvolvedMixedPoisson,
    MixedPoissonSpec,
    mp_convolve,
    mp_factorial_moment,
    mp_mgf,
    mp_pmf,
    mp_pmf_closed,
    mp_pmf_normalization,
    mp_pmf_quadrature,
    mp_pmf_series,
    mp_power_moment,
)
from .errors import (
    DensityUnavailableError,
    EnumerationCapError,
    MgfRegionError,
    MixPoissonError,
    NoClosedFormError,
    SeriesDivergenceError,
    SeriesOrderExceededError,
    SingularSeriesError,
    TenabilityError,
    UnknownModelError,
)
from .mixing import (
    CarlemanDiagnostic,
    MixingLaw,
    block_law,
    branch_law,
    carleman_partial_sum,
    crp_law,
    degenerate,
    from_moments,
    gamma,
    law_density,
    law_mgf,
    law_moment,
    poisson,
    rayleigh,
    weibull,
)
from .models import (
    MODEL_TAGS,
    AsymptoticValue,
    ModelSpec,
    ScaleInfo,
    blocks_fm,
    branches_fm,
    bridge_fm,
    crp_fm,
    crp_params,
    descendants_fm,
    dimurn_fm,
    edgecut_fm,
    edgecut_fm_numeric,
    family_ratio,
    inversions_fm,
    mapping_fm,
    nodedeg_fm,
    parking_fm,
    records_fm,
    scale_lambda,
    triangular_mean,
    triangular_rising_fm,
    triangular_rising_fm_gamma_form,
)
from .numerics import (
    adaptive_quad,
    chi2_sf,
    falling,
    gamma_ratio,
    gen_binomial,
    log_gamma,
    regularized_gamma_q,
    rising,
    stirling1_unsigned,
    stirling2,
    upper_incomplete_gamma,
)
from .series import DEFAULT_ORDER, TruncatedSeries, coeff_binom_4z, tree_resolvent_coeff, tree_series
from .simulate import (
    LabeledTree,
    Rng,
    TreeStats,
    bridge_visits,
    count_record_subtrees,
    kernels_path,
    mapping_tree_sizes,
    max_record_subtree_sizes,
    mc_counts,
    mc_values,
    parking_increments,
    parking_to_forest,
    sample_bridge,
    sample_cayley,
    sample_mapping,
    sample_parking,
    sim_crp,
    sim_edgecut,
    sim_increasing_tree,
    sim_kstirling,
    sim_urn,
    tree_stats,
)
from .transforms import (
    MomentSeq,
    egf_stirling_substitute,
    falling_to_power,
    inverse_stirling_transform,
    power_to_falling,
    rising_to_falling_shifted,
    stirling_transform,
)

__version__ = "0.1.0"
