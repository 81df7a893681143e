"""Brownian local time from piecewise-linear paths: occupation densities,
Tanaka's formula and dyadic sign-change sums."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .path_model import (  # noqa: F401
    MAX_LEVEL,
    BinaryCode,
    DyadicRational,
    PiecewiseLinearPath,
    SchauderCoeffs,
    approximation_gaps,
    decode_code,
    encode_path,
    evaluate,
    schauder_basis,
    schauder_coefficients,
    schauder_partial_sum,
)
from .sampler import (  # noqa: F401
    GENERATOR,
    brownian_grid_batch,
    brownian_path,
    complexity_proxy,
    random_brownian,
    random_code,
)
from .occupation import (  # noqa: F401
    OccupationQuery,
    occupation_density_estimate,
    occupation_measure,
    occupation_time,
)
from .integration import (  # noqa: F401
    IntegralResult,
    IntegrandSpec,
    mollifier_eval,
    mollifier_expectation_bound,
    pathwise_integral,
    riemann_integral,
    simple_integrand,
)
from .local_time import (  # noqa: F401
    LocalTimeCurve,
    cross_validate,
    discrete_tanaka_identity,
    local_time_curve,
    local_time_occupation,
    local_time_sign_change,
    local_time_tanaka,
    one_sided_formulas,
    sign_change_set,
)
