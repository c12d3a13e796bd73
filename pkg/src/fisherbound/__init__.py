"""Numerical workbench for monotone metrics, skew information and
uncertainty inequalities on finite-dimensional quantum states."""

from .errors import (
    DomainError,
    FisherBoundError,
    InternalConsistencyError,
    ParameterError,
    SingularStateError,
)
from .fop import (
    FunctionGrid,
    MonotoneFunction,
    bkm,
    bridge,
    catalog,
    check_axioms,
    custom,
    default_grid,
    eval_f,
    f_zero,
    from_key,
    rld,
    sld,
    sqrt_fn,
    tilde,
    tilde_leq,
    wy,
    wyd,
)
from .inequalities import (
    hk_decompose,
    main_gap,
    main_gaps,
    park_luo_gap,
    refined_heisenberg_gap,
    schrodinger_gap,
    witness_park_luo,
)
from .means import matrix_mean, scalar_mean, spectral, superop_apply
from .qfi import (
    MetricContext,
    area,
    c_correlation,
    f_correlation,
    inner,
    skew_information,
    variance_split,
)
from .report import GapReport
from .states import (
    DensityMatrix,
    SamplerConfig,
    center,
    commutator_tangent,
    covariance,
    sample,
    sample_observable,
    sym_covariance,
    variance,
)

__version__ = "0.1.0"
