"""World-line symmetry checker.

Numerically certifies or refutes the compatibility of an acceleration law
dv/dt = A(x, v) with kinematic symmetry algebras realized as vector fields
on position-velocity space, and checks covariance of integrated world lines
under finite transforms.
"""

__version__ = "0.1.0"

from .anomaly import (AnomalyReport, anomaly_report, bracket_defect,
                      condition_residuals, lie_bracket)
from .errors import WlcheckError
from .families import (FAMILY_INFO, FAMILY_KEYS, ScalarProfile, make_family,
                       reduce_very_special_beta0, very_special_ansatz_relations,
                       vsr_most_special_consistency)
from .generators import (BETA_KEYS, CATALOG_KEYS, SubalgebraSpec,
                         build_generator, catalog, combine_fields,
                         evaluate_field)
from .phasespace import (AccelerationLaw, PhasePoint, PointSampler,
                         SamplingDomain, accel_jacobians, sample_points)
from .trajectory import (CovarianceResult, GroupElement, Trajectory,
                         covariance_residual, integrate, transform)

__all__ = [
    "__version__", "WlcheckError",
    "AnomalyReport", "anomaly_report", "bracket_defect",
    "condition_residuals", "lie_bracket",
    "FAMILY_INFO", "FAMILY_KEYS", "ScalarProfile", "make_family",
    "reduce_very_special_beta0", "very_special_ansatz_relations",
    "vsr_most_special_consistency",
    "BETA_KEYS", "CATALOG_KEYS", "SubalgebraSpec", "build_generator",
    "catalog", "combine_fields", "evaluate_field",
    "AccelerationLaw", "PhasePoint", "PointSampler", "SamplingDomain",
    "accel_jacobians", "sample_points",
    "CovarianceResult", "GroupElement", "Trajectory", "covariance_residual",
    "integrate", "transform",
]
