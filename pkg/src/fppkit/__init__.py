"""First-passage percolation on Z^2 with half-plane inhomogeneity.

Exact passage times in seeded environments, Monte Carlo time constants with
certified upper bounds, limit-shape construction and comparison, the pyramid
gadget and the random columnar defect experiment.
"""

from .dist import (
    Dist,
    Exponential,
    FiniteAtoms,
    PointMass,
    Uniform,
    UnsupportedCombination,
    YDist,
    cdf,
    combine_sub_dom,
    dist_from_json,
    dist_to_json,
    inverse_cdf,
    more_variable,
    stochastic_order_leq,
    y_dist,
)
from .env import (
    Edge,
    EnvSpec,
    HalfPlane,
    HalfPlaneAxis,
    Homogeneous,
    OverrideField,
    RandomColumns,
    Site,
    WeightField,
    WrongSpec,
    edge,
    env_from_json,
    env_to_json,
    mix_seed,
    region_of,
    uniform_at,
)
from .fpp import (
    Box,
    Cylinder,
    Inconclusive,
    LeftHalf,
    NotContained,
    Oversize,
    PathResult,
    Restriction,
    RightHalf,
    TruncationFailure,
    brute_force_passage,
    default_box,
    exact_passage_time,
    growth_rows,
    growth_set,
    passage_time,
    variation_check,
)
from .estimate import (
    Estimate,
    axis_constant,
    directional_sweep,
    homogeneous_mu,
    radial_estimate,
    replication_times,
    scaled_direction,
)
from .shape import (
    GadgetSpec,
    InvalidGadget,
    Polygon,
    PyramidVerdict,
    SeminormEval,
    UnboundedShape,
    empirical_growth,
    empirical_shape,
    gadget_bound,
    gadget_dist,
    gadget_env,
    hausdorff,
    hull_shape,
    mubar_eval,
    pyramid_test,
    seminorm_half_shape,
    sublevel_polygon,
)
from .defects import (
    DefectReport,
    HypothesisUnmet,
    cylinder_estimate,
    defect_estimate,
    defect_sandwich,
    epsilon_sweep,
)

__version__ = "0.1.0"
