"""Discrete Laguerre inequalities: exact certification and numerical evidence."""

from .entire import (
    ClosedForm,
    ExpOfSquare,
    GaussianTimesPoly,
    PolyTimesExp,
    check_theorem34,
    f_infinity,
    hadamard_truncation,
    qn_convergence_report,
    qn_eval,
    sumlem_bounds,
    sumlem_partial,
)
from .harness import GeneratorSpec, generate, parametric_family_C, reproduce_paper_examples, run_campaign
from .laguerre import (
    MeshTooSmallError,
    NotRealRootedError,
    certify_main_theorem,
    classical_laguerre,
    discrete_fn,
    eval_fn,
    limit_check,
    sharpened_laguerre,
)
from .logderiv import MeasureMode, build_F, build_R, log_derivative, residues, superlevel_measure
from .polycore import EXACT, FLOAT, BackendError, Poly, PreconditionError, RootedPoly, expand, gcd_squarefree
from .realroots import certify_nonnegative, is_real_rooted, isolate_roots, mesh_at_least, mesh_size, sturm_count

__version__ = "0.1.0"
