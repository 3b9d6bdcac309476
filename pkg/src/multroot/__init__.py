"""Singular roots of polynomial systems: deflation by Schur-complement
kerneling, singular Newton iteration and alpha/gamma certificates."""

__version__ = "0.1.0"

from .bergman import BallContext, SmallnessReport, bergman_norm, derivative_bound, smallness_certificate
from .deflation import (
    COMPLETED,
    DEPTH_EXCEEDED,
    SMALLNESS_FAILED,
    DeflationError,
    DeflationTrace,
    OrderBudgetError,
    deflation_sequence,
    extract_deflated,
    kerneling,
    schur_complement,
)
from .multiplicity import MultiplicityResult, check_drop, multiplicity, valuation
from .newton import (
    Certificate,
    NewtonRun,
    SingularJacobianError,
    alpha_certificate,
    certify_singular,
    gamma_certificate,
    newton_step,
    singular_newton,
)
from .numrank import RankProfile, numerical_rank
from .parse import ParseError, parse_system
from .poly import PolySystem, SeriesSystem, eval_system, jacobian, recenter
