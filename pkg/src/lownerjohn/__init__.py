"""Lowner and John ellipsoid functions of log-concave functions.

The minimal-integral ellipsoidal majorant exp(-||T(x+b)|| + t) of a
log-concave f and the maximal scaled-ellipsoid-indicator minorant, computed
through a one-parameter family of centered maximum-determinant inscribed
ellipsoid problems, plus the polar-duality checks relating the two.
"""

__version__ = "0.1.0"

from .core import (
    EllipsoidalFunction,
    GridFunction,
    IndicatorFunction,
    LogConcaveFunction,
    PiecewiseQuadratic1D,
    RadialFunction,
    SupportFunction,
    TiltedFunction,
    ellipsoidal_integral,
    eval_psi,
    sup_norm,
    unit_ball_volume,
)
from .duality import (
    DualityReport,
    counterexample_function,
    counterexample_h,
    counterexample_report,
    duality_check,
    polar_of_ellipsoidal,
)
from .geometry import (
    HPolytope,
    SymmetricPolytope,
    hausdorff_distance,
    level_set,
    symmetrize,
    translate,
)
from .legendre import PolarFunction, legendre_nd, llt_1d, polar, tilt_polar
from .mvie import InscribedEllipsoid, centered_mvie, mvie_certificate
from .oracle import (
    OracleResult,
    brute_centered_mvie_2d,
    brute_john_1d,
    brute_lowner_1d,
    default_grids_1d,
)
from .profiles import (
    CONE_PROFILE,
    GAUSSIAN_PROFILE,
    PowerSumProfile,
    WallProfile,
)
from .solver import (
    CenterObjective,
    PolarLevelSets,
    PrimalLevelSets,
    SolveReport,
    XiProfile,
    john,
    john_at_center,
    lowner,
    lowner_at_center,
    maximize_xi,
    radial_lowner,
    symmetral_1d,
    verify_domination,
    xi,
    xi_scan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
