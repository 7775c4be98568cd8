"""Fourier-Galerkin simulation and verification toolkit for the periodic
fourth-order cubic NLS and its Wick-ordered variant."""

from .spectrum import (
    DyadicBlock,
    FileFormatError,
    FourierState,
    Trajectory,
    analyze,
    blocks_covering,
    hs_norm,
    load_state,
    load_trajectory,
    project_dyadic,
    project_leq,
    save_state,
    save_trajectory,
    synthesize,
)
from .dynamics import (
    FULL,
    WICK,
    EquationKind,
    IntegratorSpec,
    Kind,
    NumericFailure,
    Scheme,
    cubic_convolution,
    exact_resonant_flow,
    integrate,
    nonlinearity_nonresonant,
    nonlinearity_resonant,
    rhs,
    step,
)
from .resonance import (
    ModifiedPhase,
    ResonanceQuadruple,
    enumerate_nonresonant,
    g_tilde_value,
    g_value,
    h_factored,
    h_value,
    normal_form_boundary,
)
from .gauge import gauge_apply, gauge_equivalence_check, gauge_invert
from .diagnostics import (
    SpaceTimeField,
    dyadic_gap_profile,
    hamiltonian,
    mass,
    modulus_rate,
    smoothing_gap,
    symplectic_form,
    trilinear_ratio,
    ysb_norm,
)
from .experiments import (
    ExperimentReport,
    ProfileKind,
    ProfileSpec,
    fit_decay_rate,
    run_approximation_study,
    run_perturbation_study,
    run_squeeze_probe,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
