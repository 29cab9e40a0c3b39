"""oscillabound: Fourier transforms of measures on polynomial curves over
the reals and the p-adics, certified uniform lower bounds for them, and the
spectral / combinatorial machinery those bounds feed (independence ratios,
chromatic bounds, clique and coloring experiments on curve difference sets).
"""

from .cayleylab import (
    BezoutCliqueData,
    BoxSet,
    CliqueInstance,
    ConfigResult,
    DensityEstimate,
    bezout_clique_data,
    clique_search,
    color_point,
    coloring_threshold,
    config_search,
    curve_difference_oracle,
    multivariate_reduce,
    periodic_coloring_verify,
    upper_density_estimate,
)
from .padic import (
    PadicWindow,
    certified_bound_padic,
    echelon_reduce,
    ess_part,
    mu_hat_padic,
    padic_vdc_check,
    sphere_character_sum,
    vp,
)
from .polycore import (
    CurveFamily,
    RationalPoly,
    check_independence,
    high_freq_constants,
    parse_curve_family,
    parse_rational,
)
from .realosc import (
    CertifiedBound,
    IntervalDecomposition,
    QuadratureError,
    Window,
    WitnessInterval,
    certified_constant_real,
    classify_frequency,
    mu_hat_real,
    mu_hat_real_with_error,
    osc_integral,
    superlevel_decompose,
    vdc_bound,
    witness_intervals,
    write_profile_csv,
)
from .spectral import (
    MinimizationReport,
    PipelineConsistencyError,
    PipelineResult,
    hoffman_chromatic_bound,
    hoffman_ratio_bound,
    independence_pipeline,
    minimize_mu_hat,
    operator_ratio_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BezoutCliqueData",
    "BoxSet",
    "CertifiedBound",
    "CliqueInstance",
    "ConfigResult",
    "CurveFamily",
    "DensityEstimate",
    "IntervalDecomposition",
    "MinimizationReport",
    "PadicWindow",
    "PipelineConsistencyError",
    "PipelineResult",
    "QuadratureError",
    "RationalPoly",
    "Window",
    "WitnessInterval",
    "bezout_clique_data",
    "certified_bound_padic",
    "certified_constant_real",
    "check_independence",
    "classify_frequency",
    "clique_search",
    "color_point",
    "coloring_threshold",
    "config_search",
    "curve_difference_oracle",
    "echelon_reduce",
    "ess_part",
    "high_freq_constants",
    "hoffman_chromatic_bound",
    "hoffman_ratio_bound",
    "independence_pipeline",
    "minimize_mu_hat",
    "mu_hat_padic",
    "mu_hat_real",
    "mu_hat_real_with_error",
    "multivariate_reduce",
    "operator_ratio_bound",
    "osc_integral",
    "padic_vdc_check",
    "parse_curve_family",
    "parse_rational",
    "periodic_coloring_verify",
    "sphere_character_sum",
    "superlevel_decompose",
    "upper_density_estimate",
    "vdc_bound",
    "vp",
    "witness_intervals",
    "write_profile_csv",
]
