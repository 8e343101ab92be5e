"""Discrete maximal operators, Jacobian inequalities, singular integrals and
p-harmonic transforms on uniform grids."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    FieldFormatError,
    MaxHarmError,
    ParameterError,
    PreconditionError,
)
from .fieldio import load_field, save_field
from .grid import Domain, Grid, MatrixField, ScalarField, Topology, VectorField
from .jacobian import (
    MappingField,
    check_bmo_pairing,
    check_convolution_bound,
    check_dual_log,
    check_hardy_bound,
    check_isoperimetric,
    check_llogl,
    cofactor,
    differential,
    jacobian_det,
)
from .maximal import MaximalConfig, Mode, h1_norm, max_hl, max_interp, max_mollified, max_sharp, max_spherical
from .norms import bmo_seminorm, llogl_norm, lq_norm
from .pharmonic import (
    PHarmonicProblem,
    SolveReport,
    check_local_estimates,
    check_rp_bound,
    check_very_weak,
    p_dirichlet_ball,
    rp_transform,
)
from .reports import ChainReport, InequalityReport
from .spectral import (
    CommutatorReport,
    MultiplierOp,
    commutator_crw,
    commutator_power,
    commutator_rw,
    czo_apply,
    hodge_decompose,
    riesz2_apply,
    t_apply,
)
from .stencils import Mollifier, StencilSet, ball_average, sphere_average

__version__ = "0.1.0"
