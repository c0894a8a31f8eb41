"""Sampling, transport and distance computations for ellipsoids and Gaussian spaces."""

from .errors import ConfigError, InvalidArgument
from .families import CriteriaReport, SequenceFamily, check_conditions, check_criteria
from .measures import (
    EllipsoidKind,
    EllipsoidSpec,
    GaussianSpec,
    PointCloud,
    RegionSpec,
    linear_scale,
    project,
    region_mask,
    sample_ball,
    sample_ellipsoid,
    sample_gaussian,
    sample_sphere,
)
from .metrics import (
    DiscretePair,
    box_upper_bound,
    box_upper_bound_details,
    coupling_feasibility,
    gelbrich_w2,
    kyfan_pairs,
    prokhorov_empirical,
    tv_discrete,
    wasserstein_1d,
    wasserstein_assignment,
    wasserstein_to_point,
)
from .observables import (
    Projection,
    Scale,
    check_domination,
    dissipation_series,
    obs_diameter_lower,
    partial_diameter_1d,
)
from .report import emit_report, report_from_dict, report_to_dict
from .special import reg_lower_gamma, reg_upper_gamma
from .suites import SUITES, ExperimentReport, run_suite
from .transport import (
    RadialProfile,
    TransportMapSpec,
    annulus_profile,
    apply_transport,
    opnorm_at,
    transport_points,
)

__version__ = "0.1.0"
