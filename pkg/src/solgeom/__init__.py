"""Geodesics, invariants and distances in the SOL model geometry, with closed-form NIL geodesics."""

from .errors import (
    AdmissibilityError,
    DomainError,
    GeodesicClassError,
    IntegrationError,
    NormalizationError,
    PreconditionError,
    SolGeomError,
    SolverError,
)
from .group import ORIGIN, Isometry, Point, TangentVec, group_inverse, group_mul, metric_norm
from .elliptic import agm, complete_elliptic
from .invariants import (
    invariant_derivatives,
    invariant_set,
    invert_H,
    invert_T,
    modulus_from_ab,
)
from .flow import (
    GeodesicSpec,
    Trajectory,
    evaluate,
    integrate,
    normal_form,
    spec_from_initial,
    spec_from_kh,
)
from .rendezvous import jacobi_endpoint_defect, partner_at, rendezvous_check
from .distance import distance, ground_asymptotic, horizontal_conjugate_time, shoot_distance
from .nil import nil_eval, nil_from_initial
from .kernel import active_backend, available_backends, use_backend

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
