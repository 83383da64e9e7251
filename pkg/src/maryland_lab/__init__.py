"""Exact propagators for Maryland-class (linear Toeplitz) Hamiltonians."""

from .bessel import bessel_j, bessel_j0_zero, bessel_j_array, jacobi_anger_coeffs
from .bloch import (
    DunlapParams,
    dunlap_argument,
    dunlap_propagator,
    localization_scan,
    msd,
    msd_closed_form,
)
from .laurent import (
    GridTooSmallError,
    LaurentOperator,
    NonHermitianError,
    PropagatorBlock,
    SymbolFunction,
    WaveState,
    WindowOverflowError,
    apply_operator,
    bidiagonal,
    block_from_laurent,
    coeffs_to_symbol,
    commutator_norm,
    exp_bidiagonal,
    exp_symbol,
    laurent_product,
    symbol_to_coeffs,
)
from .oracle import (
    DimensionTooSmallError,
    InsufficientMarginError,
    OracleResult,
    compare_center_block,
    converged_trotter,
    free_propagator,
    richardson_pair,
    trotter_evolve,
)
from .qklr import (
    FloquetEigenstate,
    FloquetSpectrum,
    QklrParams,
    build_eigenstate,
    floquet_eigenvalues,
    gamma_delta,
    kick_sum_residual,
    mean_square_momentum,
    period_check,
    qklr_propagator,
)
from .solver import (
    AccumulatedInteraction,
    ConstantOmega,
    KickedPotential,
    PhaseIntegral,
    SinusoidalField,
    Tabulated,
    accumulate_interaction,
    evolve_state,
    interaction_exponential,
    phase_integral,
    propagator_interaction,
    to_schrodinger,
)

__version__ = "0.1.0"
